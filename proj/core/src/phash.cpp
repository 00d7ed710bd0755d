#include "facaderisk/phash.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "facaderisk/error.hpp"
#include "facaderisk/hashutil.hpp"

namespace facaderisk {
namespace {

constexpr int kSide = 32;
constexpr int kBlock = 8;
constexpr double kPi = 3.14159265358979323846;

// Orthonormal 2-D type-II DCT of a 32x32 raster. The naive O(n^4) form is
// fine at this size and keeps the definition explicit.
std::array<double, kSide * kSide> dct2d(const std::vector<float>& in) {
    std::array<double, kSide * kSide> cos_tab{};
    for (int u = 0; u < kSide; ++u) {
        for (int x = 0; x < kSide; ++x) {
            cos_tab[static_cast<std::size_t>(u) * kSide + x] =
                std::cos((2.0 * x + 1.0) * u * kPi / (2.0 * kSide));
        }
    }
    // separable: rows first, then columns
    std::array<double, kSide * kSide> tmp{};
    for (int y = 0; y < kSide; ++y) {
        for (int u = 0; u < kSide; ++u) {
            double acc = 0.0;
            for (int x = 0; x < kSide; ++x) {
                acc += in[static_cast<std::size_t>(y) * kSide + x] *
                       cos_tab[static_cast<std::size_t>(u) * kSide + x];
            }
            tmp[static_cast<std::size_t>(y) * kSide + u] = acc;
        }
    }
    std::array<double, kSide * kSide> out{};
    const double a0 = std::sqrt(1.0 / kSide);
    const double a = std::sqrt(2.0 / kSide);
    for (int v = 0; v < kSide; ++v) {
        for (int u = 0; u < kSide; ++u) {
            double acc = 0.0;
            for (int y = 0; y < kSide; ++y) {
                acc += tmp[static_cast<std::size_t>(y) * kSide + u] *
                       cos_tab[static_cast<std::size_t>(v) * kSide + y];
            }
            const double su = (u == 0) ? a0 : a;
            const double sv = (v == 0) ? a0 : a;
            out[static_cast<std::size_t>(v) * kSide + u] = su * sv * acc;
        }
    }
    return out;
}

}  // namespace

std::uint64_t phash64_from_raster(const std::vector<float>& gray32) {
    if (gray32.size() != static_cast<std::size_t>(kSide) * kSide) {
        throw Error("phash raster must be 32x32");
    }
    const auto freq = dct2d(gray32);

    std::array<double, kBlock * kBlock> block{};
    for (int v = 0; v < kBlock; ++v) {
        for (int u = 0; u < kBlock; ++u) {
            block[static_cast<std::size_t>(v) * kBlock + u] =
                freq[static_cast<std::size_t>(v) * kSide + u];
        }
    }

    std::array<double, kBlock * kBlock - 1> rest{};
    std::copy(block.begin() + 1, block.end(), rest.begin());
    std::nth_element(rest.begin(), rest.begin() + rest.size() / 2, rest.end());
    const double median = rest[rest.size() / 2];

    std::uint64_t bits = 0;
    for (int i = 0; i < kBlock * kBlock; ++i) {
        bits <<= 1;
        if (block[static_cast<std::size_t>(i)] > median) bits |= 1;
    }
    return bits;
}

std::uint64_t phash64(const Image& img) {
    if (img.empty()) throw Error("phash of empty image");
    const auto gray = to_luma(img);
    const auto small = resize_bilinear(gray, img.width, img.height, kSide, kSide);
    return phash64_from_raster(small);
}

void save_hash_cache(const std::filesystem::path& path,
                     const std::vector<PerceptualHash>& hashes) {
    std::vector<PerceptualHash> sorted = hashes;
    std::sort(sorted.begin(), sorted.end(),
              [](const PerceptualHash& a, const PerceptualHash& b) {
                  return a.image_id < b.image_id;
              });
    std::ofstream out(path);
    if (!out) throw Error("cannot write hash cache: " + path.string());
    for (const auto& h : sorted) {
        out << h.image_id << '\t' << to_hex16(h.bits) << '\n';
    }
}

std::vector<PerceptualHash> load_hash_cache(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read hash cache: " + path.string());
    std::vector<PerceptualHash> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw Error("malformed hash cache line: " + line);
        out.push_back({line.substr(0, tab), parse_hex16(line.substr(tab + 1))});
    }
    return out;
}

}  // namespace facaderisk
