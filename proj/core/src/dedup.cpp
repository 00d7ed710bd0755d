#include "facaderisk/dedup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "facaderisk/error.hpp"

namespace facaderisk {

namespace fs = std::filesystem;

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<DuplicateCluster> cluster_duplicates(
    const std::vector<PerceptualHash>& hashes, int threshold) {
    if (threshold < 0 || threshold > 64) throw Error("dedup threshold must be in [0, 64]");

    const std::size_t n = hashes.size();
    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (hamming_distance(hashes[i].bits, hashes[j].bits) <= threshold) {
                uf.unite(i, j);
            }
        }
    }

    std::unordered_map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[uf.find(i)].push_back(i);

    std::vector<DuplicateCluster> out;
    out.reserve(groups.size());
    for (auto& [root, idxs] : groups) {
        DuplicateCluster c;
        for (std::size_t i : idxs) c.members.push_back(hashes[i].image_id);
        std::sort(c.members.begin(), c.members.end());
        c.representative = c.members.front();
        for (std::size_t a = 0; a < idxs.size(); ++a) {
            for (std::size_t b = a + 1; b < idxs.size(); ++b) {
                c.max_internal_distance =
                    std::max(c.max_internal_distance,
                             hamming_distance(hashes[idxs[a]].bits, hashes[idxs[b]].bits));
            }
        }
        out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const DuplicateCluster& a, const DuplicateCluster& b) {
        return a.representative < b.representative;
    });
    return out;
}

CategoryVerdict HeuristicFacadeFilter::classify(const Image& img) const {
    const auto gray = to_luma(img);
    const int w = img.width;
    const int h = img.height;

    double edge = 0.0;
    std::size_t edge_n = 0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = gray[static_cast<std::size_t>(y) * w + x];
            if (x + 1 < w) {
                edge += std::abs(v - gray[static_cast<std::size_t>(y) * w + x + 1]);
                ++edge_n;
            }
            if (y + 1 < h) {
                edge += std::abs(v - gray[(static_cast<std::size_t>(y) + 1) * w + x]);
                ++edge_n;
            }
        }
    }
    const double edge_density = edge_n ? edge / static_cast<double>(edge_n) : 0.0;

    const int top_rows = std::max(1, h / 4);
    double top_sum = 0.0, bottom_sum = 0.0, total = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = gray[static_cast<std::size_t>(y) * w + x];
            total += v;
            if (y < top_rows) top_sum += v;
            else bottom_sum += v;
        }
    }
    const double top_mean = top_sum / (static_cast<double>(top_rows) * w);
    const double bottom_mean =
        bottom_sum / (static_cast<double>(h - top_rows) * std::max(1, w));
    const double mean = total / (static_cast<double>(h) * w);

    if (edge_density < 0.2) return CategoryVerdict::NoResidential;
    if (top_mean >= bottom_mean + 8.0) return CategoryVerdict::EntireResidential;
    if (mean < 90.0) return CategoryVerdict::InsideResidential;
    return CategoryVerdict::Other;
}

std::unique_ptr<CategoryFilter> make_category_filter(const std::string& name) {
    if (name == "heuristic") return std::make_unique<HeuristicFacadeFilter>();
    if (name == "none") return std::make_unique<AcceptAllFilter>();
    throw Error("unknown category filter: " + name);
}

CategoryFilterResult apply_category_filter(const std::vector<ImageRecord>& images,
                                           const fs::path& manifest_path,
                                           const CategoryFilter& filter) {
    CategoryFilterResult out;
    for (const auto& rec : images) {
        CategoryVerdict verdict;
        try {
            const Image img = decode_image(resolve_image_path(manifest_path, rec));
            verdict = filter.classify(img);
        } catch (const std::exception&) {
            out.rejected.push_back({rec.image_id, "filter_error"});
            continue;
        }
        if (verdict == CategoryVerdict::EntireResidential) {
            ImageRecord kept = rec;
            kept.category_verdict = verdict;
            out.retained.push_back(std::move(kept));
        } else {
            out.rejected.push_back({rec.image_id, to_string(verdict)});
        }
    }
    return out;
}

DedupSummary run_dedup(const fs::path& images_manifest, const fs::path& out_manifest,
                       int threshold, const CategoryFilter& filter) {
    const fs::path out_dir =
        out_manifest.has_parent_path() ? out_manifest.parent_path() : fs::path(".");
    fs::create_directories(out_dir);

    auto manifest = load_image_manifest(images_manifest);
    std::vector<Rejection> rejections;

    // hash every decodable image
    std::vector<PerceptualHash> hashes;
    std::unordered_map<std::string, const ImageRecord*> by_id;
    std::vector<const ImageRecord*> hashable;
    for (const auto& rec : manifest.records) by_id[rec.image_id] = &rec;
    for (const auto& rec : manifest.records) {
        try {
            const Image img = decode_image(resolve_image_path(images_manifest, rec));
            hashes.push_back({rec.image_id, phash64(img)});
            hashable.push_back(&rec);
        } catch (const std::exception&) {
            rejections.push_back({rec.image_id, "undecodable"});
        }
    }

    // near-duplicate removal, scoped per property
    std::map<std::string, std::vector<PerceptualHash>> per_property;
    for (const auto& h : hashes) {
        per_property[by_id.at(h.image_id)->property_id].push_back(h);
    }
    std::unordered_set<std::string> keep;
    std::size_t duplicate_drops = 0;
    for (const auto& [pid, group] : per_property) {
        for (const auto& cluster : cluster_duplicates(group, threshold)) {
            keep.insert(cluster.representative);
            for (const auto& m : cluster.members) {
                if (m != cluster.representative) {
                    rejections.push_back({m, "near_duplicate_of:" + cluster.representative});
                    ++duplicate_drops;
                }
            }
        }
    }

    std::vector<ImageRecord> survivors;
    std::unordered_map<std::string, std::uint64_t> hash_by_id;
    for (const auto& h : hashes) hash_by_id[h.image_id] = h.bits;
    for (const ImageRecord* rec : hashable) {
        if (!keep.contains(rec->image_id)) continue;
        ImageRecord r = *rec;
        r.phash = hash_by_id.at(r.image_id);
        survivors.push_back(std::move(r));
    }

    auto filtered = apply_category_filter(survivors, images_manifest, filter);
    for (const auto& r : filtered.rejected) rejections.push_back(r);

    // re-anchor paths to the output manifest's directory
    std::vector<ImageRecord> kept = filtered.retained;
    for (auto& rec : kept) {
        const fs::path abs = resolve_image_path(images_manifest, rec);
        rec.path = fs::relative(abs, out_dir).generic_string();
    }

    std::vector<PerceptualHash> kept_hashes;
    kept_hashes.reserve(kept.size());
    for (const auto& rec : kept) kept_hashes.push_back({rec.image_id, *rec.phash});

    save_image_manifest(out_manifest, kept);
    save_hash_cache(out_dir / "hashes.tsv", kept_hashes);
    save_rejections(out_dir / "rejections.jsonl", rejections);

    DedupSummary s;
    s.images_in = manifest.records.size();
    s.images_retained = kept.size();
    s.duplicate_drops = duplicate_drops;
    s.category_drops = filtered.rejected.size();
    return s;
}

}  // namespace facaderisk
