#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "facaderisk/image.hpp"
#include "facaderisk/ingest.hpp"
#include "facaderisk/manifest.hpp"
#include "facaderisk/phash.hpp"

namespace facaderisk {

/// Connected component of near-duplicate images (single linkage).
struct DuplicateCluster {
    std::string representative;        // lexicographically smallest member id
    std::vector<std::string> members;  // sorted
    int max_internal_distance = 0;     // cluster diameter in Hamming bits
};

/// Single-linkage clustering under Hamming <= threshold. Output clusters
/// partition the input and are sorted by representative id.
std::vector<DuplicateCluster> cluster_duplicates(
    const std::vector<PerceptualHash>& hashes, int threshold);

/// Pluggable image-category classifier. Implementations must be
/// deterministic for a fixed configuration.
class CategoryFilter {
public:
    virtual ~CategoryFilter() = default;
    virtual CategoryVerdict classify(const Image& img) const = 0;
    virtual std::string name() const = 0;
};

/// Default stand-in classifier driven by brightness and edge statistics:
/// featureless rasters are NoResidential, bright-sky-over-structure
/// compositions are EntireResidential, dim textured scenes are
/// InsideResidential, the rest Other.
class HeuristicFacadeFilter : public CategoryFilter {
public:
    CategoryVerdict classify(const Image& img) const override;
    std::string name() const override { return "heuristic"; }
};

/// Accepts everything; useful to bypass filtering.
class AcceptAllFilter : public CategoryFilter {
public:
    CategoryVerdict classify(const Image&) const override {
        return CategoryVerdict::EntireResidential;
    }
    std::string name() const override { return "none"; }
};

std::unique_ptr<CategoryFilter> make_category_filter(const std::string& name);

struct CategoryFilterResult {
    std::vector<ImageRecord> retained;  // with category_verdict set
    std::vector<Rejection> rejected;    // reason = verdict, or `filter_error`
};

/// Keeps exactly the EntireResidential verdicts. Image paths are resolved
/// against `manifest_path`. A decode/filter failure rejects that image
/// with reason `filter_error` and the pipeline continues.
CategoryFilterResult apply_category_filter(const std::vector<ImageRecord>& images,
                                           const std::filesystem::path& manifest_path,
                                           const CategoryFilter& filter);

struct DedupSummary {
    std::size_t images_in = 0;
    std::size_t images_retained = 0;
    std::size_t duplicate_drops = 0;
    std::size_t category_drops = 0;
};

/// Full dedup stage: hash every image, cluster near-duplicates within
/// each property (duplicates across properties are legitimate distinct
/// listings), keep one representative per cluster, then apply the
/// category filter. Writes the surviving manifest to out_manifest and
/// `hashes.tsv` / `rejections.jsonl` next to it.
DedupSummary run_dedup(const std::filesystem::path& images_manifest,
                       const std::filesystem::path& out_manifest,
                       int threshold,
                       const CategoryFilter& filter);

}  // namespace facaderisk
