#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "facaderisk/manifest.hpp"

namespace facaderisk {

enum class Split { Train, Test };

std::string to_string(Split s);

/// Property-level train/test partition. Computed from a stable hash of
/// (seed, property_id): adding properties never reshuffles existing
/// assignments, and every image of a property inherits its assignment.
struct SplitAssignment {
    std::unordered_map<std::string, Split> by_property;
    std::uint64_t seed = 0;
    double train_fraction = 0.8;

    Split of(const std::string& property_id) const;
};

/// The stable-hash primitive: pure in (seed, property_id, fraction).
Split assign_split(std::uint64_t seed, const std::string& property_id,
                   double train_fraction);

/// Throws on duplicate property_id or train_fraction outside (0, 1).
SplitAssignment split_properties(const std::vector<PropertyRecord>& records,
                                 std::uint64_t seed, double train_fraction);

/// Split file: `property_id<TAB>train|test` lines, sorted by property_id.
void save_split(const std::filesystem::path& path, const SplitAssignment& split);
SplitAssignment load_split(const std::filesystem::path& path);

}  // namespace facaderisk
