#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace facaderisk {

/// Interleaved 8-bit RGB raster.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  // width * height * 3, row-major

    bool empty() const { return width <= 0 || height <= 0; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
};

/// Decodes PNG/JPEG from disk. Throws Error naming the file on failure.
Image decode_image(const std::filesystem::path& path);
Image decode_image_bytes(const std::vector<std::uint8_t>& bytes);

void write_png(const std::filesystem::path& path, const Image& img);
std::vector<std::uint8_t> encode_png(const Image& img);
std::vector<std::uint8_t> encode_jpeg(const Image& img, int quality);

/// Grayscale conversion: luma = 0.299 R + 0.587 G + 0.114 B, rounded to
/// nearest.
std::vector<std::uint8_t> to_luma(const Image& img);

/// Bilinear resample of a single-channel raster (half-pixel centers,
/// edge clamp). Output is float; no re-quantization.
std::vector<float> resize_bilinear(const std::vector<std::uint8_t>& gray,
                                   int width, int height,
                                   int out_width, int out_height);

/// Bilinear RGB resize used to bring arbitrary inputs to the model's
/// input resolution.
Image resize_rgb(const Image& img, int out_width, int out_height);

}  // namespace facaderisk
