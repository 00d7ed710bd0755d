#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "facaderisk/manifest.hpp"

namespace facaderisk {

/// One dropped record and the machine-readable reason for the drop.
/// Reasons emitted here: `pre_1915`, `non_residential`, `missing_value`,
/// plus `missing_field:<name>` / `bad_line:<msg>` for parse-level drops
/// and `property_not_retained` for orphaned images.
struct Rejection {
    std::string id;  // property_id or image_id
    std::string reason;
};

struct FilterResult {
    std::vector<PropertyRecord> retained;
    std::vector<Rejection> rejected;
};

/// Metadata validity filter. Drops records constructed before 1915 and
/// records whose raw category is outside the residential whitelist.
/// |retained| + |rejected| == |input|; idempotent on its own output.
FilterResult filter_metadata(const std::vector<PropertyRecord>& records);

struct IngestSummary {
    std::size_t properties_in = 0;
    std::size_t properties_retained = 0;
    std::size_t images_in = 0;
    std::size_t images_retained = 0;
    std::size_t parse_diagnostics = 0;
};

/// Full ingest stage: load both manifests, filter properties, drop images
/// whose property was not retained, and write
/// `properties.jsonl`, `images.jsonl`, `rejections.jsonl` into out_dir.
/// Image paths are rewritten relative to out_dir.
IngestSummary run_ingest(const std::filesystem::path& properties_path,
                         const std::filesystem::path& images_path,
                         const std::filesystem::path& out_dir);

void save_rejections(const std::filesystem::path& path,
                     const std::vector<Rejection>& rejections);

}  // namespace facaderisk
