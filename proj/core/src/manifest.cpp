#include "facaderisk/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "facaderisk/error.hpp"
#include "facaderisk/hashutil.hpp"

namespace facaderisk {
namespace {

using nlohmann::ordered_json;

// Returns nullopt and fills `why` if the field is absent or mistyped.
template <typename T>
std::optional<T> field(const ordered_json& j, const char* name, std::string& why) {
    if (!j.contains(name)) {
        why = std::string("missing field '") + name + "'";
        return std::nullopt;
    }
    try {
        return j.at(name).get<T>();
    } catch (const ordered_json::exception&) {
        why = std::string("field '") + name + "' has wrong type";
        return std::nullopt;
    }
}

}  // namespace

PropertyManifest load_property_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read property manifest: " + path.string());

    PropertyManifest out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            out.diagnostics.push_back({line_no, "not a JSON object"});
            continue;
        }
        std::string why;
        auto id = field<std::string>(j, "property_id", why);
        auto year = field<int>(j, "construction_year", why);
        auto structure_s = field<std::string>(j, "structure", why);
        auto category_s = field<std::string>(j, "category", why);
        if (!id || !year || !structure_s || !category_s) {
            out.diagnostics.push_back({line_no, why});
            continue;
        }
        auto structure = parse_structure(*structure_s);
        if (!structure) {
            out.diagnostics.push_back(
                {line_no, "field 'structure' has unknown value '" + *structure_s + "'"});
            continue;
        }
        PropertyRecord rec;
        rec.property_id = *id;
        rec.construction_year = *year;
        rec.structure = *structure;
        rec.raw_category = parse_category(*category_s);
        rec.ptype = property_type_of(rec.raw_category);
        if (rec.ptype) rec.fireproof = fireproof_class(rec.structure, *rec.ptype);
        out.records.push_back(std::move(rec));
    }
    return out;
}

ImageManifest load_image_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read image manifest: " + path.string());

    ImageManifest out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            out.diagnostics.push_back({line_no, "not a JSON object"});
            continue;
        }
        std::string why;
        auto id = field<std::string>(j, "image_id", why);
        auto pid = field<std::string>(j, "property_id", why);
        auto p = field<std::string>(j, "path", why);
        if (!id || !pid || !p) {
            out.diagnostics.push_back({line_no, why});
            continue;
        }
        ImageRecord rec;
        rec.image_id = *id;
        rec.property_id = *pid;
        rec.path = *p;
        if (j.contains("phash") && j.at("phash").is_string()) {
            rec.phash = parse_hex16(j.at("phash").get<std::string>());
        }
        if (j.contains("category_verdict") && j.at("category_verdict").is_string()) {
            rec.category_verdict = parse_verdict(j.at("category_verdict").get<std::string>());
        }
        out.records.push_back(std::move(rec));
    }
    return out;
}

void save_property_manifest(const std::filesystem::path& path,
                            const std::vector<PropertyRecord>& records) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write property manifest: " + path.string());
    for (const auto& r : records) {
        ordered_json j;
        j["property_id"] = r.property_id;
        j["construction_year"] = r.construction_year;
        j["structure"] = to_string(r.structure);
        j["category"] = to_string(r.raw_category);
        if (r.ptype) j["ptype"] = to_string(*r.ptype);
        if (r.fireproof) j["fireproof"] = to_string(*r.fireproof);
        out << j.dump() << '\n';
    }
}

void save_image_manifest(const std::filesystem::path& path,
                         const std::vector<ImageRecord>& records) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write image manifest: " + path.string());
    for (const auto& r : records) {
        ordered_json j;
        j["image_id"] = r.image_id;
        j["property_id"] = r.property_id;
        j["path"] = r.path;
        if (r.phash) j["phash"] = to_hex16(*r.phash);
        if (r.category_verdict) j["category_verdict"] = to_string(*r.category_verdict);
        out << j.dump() << '\n';
    }
}

std::filesystem::path resolve_image_path(const std::filesystem::path& manifest_path,
                                         const ImageRecord& rec) {
    std::filesystem::path p(rec.path);
    if (p.is_absolute()) return p;
    return manifest_path.parent_path() / p;
}

}  // namespace facaderisk
