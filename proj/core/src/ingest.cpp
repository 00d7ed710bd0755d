#include "facaderisk/ingest.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "facaderisk/error.hpp"

namespace facaderisk {

namespace fs = std::filesystem;

FilterResult filter_metadata(const std::vector<PropertyRecord>& records) {
    FilterResult out;
    out.retained.reserve(records.size());
    for (const auto& r : records) {
        if (r.construction_year < 1915) {
            out.rejected.push_back({r.property_id, "pre_1915"});
            continue;
        }
        if (!r.ptype || !r.fireproof) {
            out.rejected.push_back({r.property_id, "non_residential"});
            continue;
        }
        out.retained.push_back(r);
    }
    return out;
}

void save_rejections(const fs::path& path, const std::vector<Rejection>& rejections) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write rejection log: " + path.string());
    for (const auto& r : rejections) {
        nlohmann::ordered_json j;
        j["id"] = r.id;
        j["reason"] = r.reason;
        out << j.dump() << '\n';
    }
}

IngestSummary run_ingest(const fs::path& properties_path,
                         const fs::path& images_path,
                         const fs::path& out_dir) {
    fs::create_directories(out_dir);

    auto props = load_property_manifest(properties_path);
    auto images = load_image_manifest(images_path);

    std::vector<Rejection> rejections;
    for (const auto& d : props.diagnostics) {
        rejections.push_back({"properties:line_" + std::to_string(d.line_no),
                              "bad_line:" + d.message});
    }
    for (const auto& d : images.diagnostics) {
        rejections.push_back({"images:line_" + std::to_string(d.line_no),
                              "bad_line:" + d.message});
    }

    auto filtered = filter_metadata(props.records);
    for (const auto& r : filtered.rejected) rejections.push_back(r);

    std::unordered_set<std::string> retained_ids;
    retained_ids.reserve(filtered.retained.size());
    for (const auto& r : filtered.retained) retained_ids.insert(r.property_id);

    std::vector<ImageRecord> kept_images;
    kept_images.reserve(images.records.size());
    for (auto& img : images.records) {
        if (!retained_ids.contains(img.property_id)) {
            rejections.push_back({img.image_id, "property_not_retained"});
            continue;
        }
        // re-anchor the path to the output manifest's directory
        const fs::path abs = resolve_image_path(images_path, img);
        ImageRecord rec = img;
        rec.path = fs::relative(abs, out_dir).generic_string();
        kept_images.push_back(std::move(rec));
    }

    save_property_manifest(out_dir / "properties.jsonl", filtered.retained);
    save_image_manifest(out_dir / "images.jsonl", kept_images);
    save_rejections(out_dir / "rejections.jsonl", rejections);

    IngestSummary s;
    s.properties_in = props.records.size() + props.diagnostics.size();
    s.properties_retained = filtered.retained.size();
    s.images_in = images.records.size() + images.diagnostics.size();
    s.images_retained = kept_images.size();
    s.parse_diagnostics = props.diagnostics.size() + images.diagnostics.size();
    return s;
}

}  // namespace facaderisk
