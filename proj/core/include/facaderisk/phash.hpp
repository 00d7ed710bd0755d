#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "facaderisk/image.hpp"

namespace facaderisk {

/// 64-bit DCT perceptual hash of one image.
struct PerceptualHash {
    std::string image_id;
    std::uint64_t bits = 0;
};

/// DCT-based 64-bit perceptual hash:
///   1. luma (0.299/0.587/0.114, rounded to nearest),
///   2. bilinear resize to 32x32,
///   3. orthonormal 2-D type-II DCT,
///   4. median of the top-left 8x8 coefficients excluding the DC term,
///   5. bit = 1 where coefficient > median, scanned row-major (the DC
///      position is compared against the same median). The first scanned
///      coefficient lands in the most significant bit.
std::uint64_t phash64(const Image& img);

/// Hash of an already-resized 32x32 grayscale raster (steps 3-5 above).
std::uint64_t phash64_from_raster(const std::vector<float>& gray32);

inline int hamming_distance(std::uint64_t a, std::uint64_t b) {
    return std::popcount(a ^ b);
}

/// Hash cache file: one `image_id<TAB>16-hex-digit-hash` line per image,
/// sorted by image_id.
void save_hash_cache(const std::filesystem::path& path,
                     const std::vector<PerceptualHash>& hashes);
std::vector<PerceptualHash> load_hash_cache(const std::filesystem::path& path);

}  // namespace facaderisk
