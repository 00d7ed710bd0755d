#pragma once

#include <filesystem>

#include "facaderisk/net.hpp"

namespace facaderisk {

/// Binary checkpoint container. Layout (all integers little-endian):
///   magic "FRISKCP1" (8 bytes)
///   u32 version (currently 1)
///   i32 input_size, i32 channels[4], i32 n_structure, i32 n_ptype
///   f32 year_anchor, f32 year_scale
///   u64 parameter count
///   f32[count] parameters in declared order (conv blocks, year head,
///              structure head, ptype head, log-variances)
/// A write -> read round trip is bit-exact.
void save_checkpoint(const std::filesystem::path& path, const MultiTaskModel& model);
MultiTaskModel load_checkpoint(const std::filesystem::path& path);

}  // namespace facaderisk
