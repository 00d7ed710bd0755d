#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace facaderisk {

/// FNV-1a over a byte range.
inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t h = 1469598103934665603ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view s) {
    return fnv1a64(s.data(), s.size());
}

/// murmur3 finalizer; improves avalanche of FNV output before it is used
/// as a uniform variate.
inline std::uint64_t fmix64(std::uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

std::string to_hex16(std::uint64_t v);
std::uint64_t parse_hex16(std::string_view s);

/// Content hash of a file (streamed FNV-1a). Throws Error if unreadable.
std::uint64_t hash_file(const std::filesystem::path& path);

}  // namespace facaderisk
