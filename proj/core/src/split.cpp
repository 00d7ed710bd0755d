#include "facaderisk/split.hpp"

#include <algorithm>
#include <fstream>

#include "facaderisk/error.hpp"
#include "facaderisk/hashutil.hpp"

namespace facaderisk {

std::string to_string(Split s) { return s == Split::Train ? "train" : "test"; }

Split SplitAssignment::of(const std::string& property_id) const {
    auto it = by_property.find(property_id);
    if (it == by_property.end()) {
        throw Error("property not in split assignment: " + property_id);
    }
    return it->second;
}

Split assign_split(std::uint64_t seed, const std::string& property_id,
                   double train_fraction) {
    unsigned char seed_bytes[8];
    for (int i = 0; i < 8; ++i) {
        seed_bytes[i] = static_cast<unsigned char>((seed >> (8 * i)) & 0xff);
    }
    std::uint64_t h = fnv1a64(seed_bytes, sizeof(seed_bytes));
    h = fnv1a64(property_id.data(), property_id.size(), h);
    const double u = static_cast<double>(fmix64(h) >> 11) * 0x1.0p-53;
    return u < train_fraction ? Split::Train : Split::Test;
}

SplitAssignment split_properties(const std::vector<PropertyRecord>& records,
                                 std::uint64_t seed, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw Error("train_fraction must be in (0, 1)");
    }
    SplitAssignment out;
    out.seed = seed;
    out.train_fraction = train_fraction;
    out.by_property.reserve(records.size());
    for (const auto& r : records) {
        const Split s = assign_split(seed, r.property_id, train_fraction);
        if (!out.by_property.emplace(r.property_id, s).second) {
            throw Error("duplicate property_id: " + r.property_id);
        }
    }
    return out;
}

void save_split(const std::filesystem::path& path, const SplitAssignment& split) {
    std::vector<std::pair<std::string, Split>> rows(split.by_property.begin(),
                                                    split.by_property.end());
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ofstream out(path);
    if (!out) throw Error("cannot write split file: " + path.string());
    for (const auto& [id, s] : rows) {
        out << id << '\t' << to_string(s) << '\n';
    }
}

SplitAssignment load_split(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read split file: " + path.string());
    SplitAssignment out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw Error("malformed split line: " + line);
        const std::string id = line.substr(0, tab);
        const std::string label = line.substr(tab + 1);
        Split s;
        if (label == "train") s = Split::Train;
        else if (label == "test") s = Split::Test;
        else throw Error("unknown split label: " + label);
        if (!out.by_property.emplace(id, s).second) {
            throw Error("duplicate property_id in split file: " + id);
        }
    }
    return out;
}

}  // namespace facaderisk
