#include "facaderisk/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "facaderisk/error.hpp"

namespace facaderisk {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'F', 'R', 'I', 'S', 'K', 'C', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw Error("checkpoint truncated");
    return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const MultiTaskModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint: " + path.string());

    const ModelConfig& cfg = model.config();
    out.write(kMagic, sizeof(kMagic));
    put(out, kVersion);
    put(out, static_cast<std::int32_t>(cfg.input_size));
    for (int c : cfg.channels) put(out, static_cast<std::int32_t>(c));
    put(out, static_cast<std::int32_t>(cfg.n_structure));
    put(out, static_cast<std::int32_t>(cfg.n_ptype));
    put(out, cfg.year_anchor);
    put(out, cfg.year_scale);

    const auto params = model.parameters();
    put(out, static_cast<std::uint64_t>(params.size()));
    out.write(reinterpret_cast<const char*>(params.data()),
              static_cast<std::streamsize>(params.size() * sizeof(float)));
    if (!out) throw Error("failed while writing checkpoint: " + path.string());
}

MultiTaskModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read checkpoint: " + path.string());

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw Error("not a checkpoint file: " + path.string());
    }
    if (get<std::uint32_t>(in) != kVersion) {
        throw Error("unsupported checkpoint version: " + path.string());
    }

    ModelConfig cfg;
    cfg.input_size = get<std::int32_t>(in);
    for (int k = 0; k < 4; ++k) cfg.channels[static_cast<std::size_t>(k)] = get<std::int32_t>(in);
    cfg.n_structure = get<std::int32_t>(in);
    cfg.n_ptype = get<std::int32_t>(in);
    cfg.year_anchor = get<float>(in);
    cfg.year_scale = get<float>(in);

    MultiTaskModel model(cfg);
    const auto count = get<std::uint64_t>(in);
    if (count != model.parameter_count()) {
        throw Error("checkpoint parameter count does not match architecture");
    }
    auto params = model.parameters();
    in.read(reinterpret_cast<char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(float)));
    if (!in) throw Error("checkpoint truncated: " + path.string());
    return model;
}

}  // namespace facaderisk
