#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "facaderisk/labels.hpp"

namespace facaderisk {

/// One real-estate property. ptype/fireproof are derived through the
/// rule mapping when the raw category is whitelisted; they stay empty for
/// Other categories, which ingestion rejects.
struct PropertyRecord {
    std::string property_id;
    int construction_year = 0;
    BuildingStructure structure = BuildingStructure::ConcreteLike;
    RawPropertyCategory raw_category;
    std::optional<PropertyType> ptype;
    std::optional<FireproofClass> fireproof;
};

/// One facade image. `path` is stored relative to the manifest that
/// declares it, so corpora stay relocatable.
struct ImageRecord {
    std::string image_id;
    std::string property_id;
    std::string path;
    std::optional<std::uint64_t> phash;
    std::optional<CategoryVerdict> category_verdict;
};

/// Parse problem for a single manifest line. The record is excluded; the
/// rest of the file still loads.
struct LineDiagnostic {
    std::size_t line_no = 0;  // 1-based
    std::string message;
};

struct PropertyManifest {
    std::vector<PropertyRecord> records;
    std::vector<LineDiagnostic> diagnostics;
};

struct ImageManifest {
    std::vector<ImageRecord> records;
    std::vector<LineDiagnostic> diagnostics;
};

/// Manifests are UTF-8 JSON lines, one record per line.
/// Property fields: property_id, construction_year, structure, category.
/// Image fields: image_id, property_id, path.
/// Unknown extra fields are ignored; missing or mistyped required fields
/// produce a diagnostic naming the field.
PropertyManifest load_property_manifest(const std::filesystem::path& path);
ImageManifest load_image_manifest(const std::filesystem::path& path);

void save_property_manifest(const std::filesystem::path& path,
                            const std::vector<PropertyRecord>& records);
void save_image_manifest(const std::filesystem::path& path,
                         const std::vector<ImageRecord>& records);

/// Resolves an ImageRecord::path against the directory of its manifest.
std::filesystem::path resolve_image_path(const std::filesystem::path& manifest_path,
                                         const ImageRecord& rec);

}  // namespace facaderisk
