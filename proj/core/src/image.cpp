#include "facaderisk/image.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <algorithm>
#include <cmath>

#include "facaderisk/error.hpp"

namespace facaderisk {
namespace {

Image from_mat(const cv::Mat& m) {
    cv::Mat bgr;
    if (m.channels() == 1) {
        cv::Mat tmp;
        cv::merge(std::vector<cv::Mat>{m, m, m}, tmp);
        bgr = tmp;
    } else if (m.channels() == 4) {
        // drop alpha
        std::vector<cv::Mat> ch;
        cv::split(m, ch);
        cv::merge(std::vector<cv::Mat>{ch[0], ch[1], ch[2]}, bgr);
    } else {
        bgr = m;
    }
    Image img;
    img.width = bgr.cols;
    img.height = bgr.rows;
    img.rgb.resize(img.pixel_count() * 3);
    for (int y = 0; y < img.height; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width; ++x) {
            const std::size_t o = (static_cast<std::size_t>(y) * img.width + x) * 3;
            img.rgb[o + 0] = row[x][2];
            img.rgb[o + 1] = row[x][1];
            img.rgb[o + 2] = row[x][0];
        }
    }
    return img;
}

cv::Mat to_mat(const Image& img) {
    cv::Mat bgr(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width; ++x) {
            const std::size_t o = (static_cast<std::size_t>(y) * img.width + x) * 3;
            row[x] = cv::Vec3b(img.rgb[o + 2], img.rgb[o + 1], img.rgb[o + 0]);
        }
    }
    return bgr;
}

}  // namespace

Image decode_image(const std::filesystem::path& path) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty()) throw Error("cannot decode image: " + path.string());
    return from_mat(m);
}

Image decode_image_bytes(const std::vector<std::uint8_t>& bytes) {
    cv::Mat m = cv::imdecode(bytes, cv::IMREAD_UNCHANGED);
    if (m.empty()) throw Error("cannot decode image from memory buffer");
    return from_mat(m);
}

void write_png(const std::filesystem::path& path, const Image& img) {
    if (img.empty()) throw Error("refusing to write empty image: " + path.string());
    if (!cv::imwrite(path.string(), to_mat(img))) {
        throw Error("cannot write image: " + path.string());
    }
}

std::vector<std::uint8_t> encode_png(const Image& img) {
    std::vector<std::uint8_t> out;
    if (!cv::imencode(".png", to_mat(img), out)) throw Error("png encode failed");
    return out;
}

std::vector<std::uint8_t> encode_jpeg(const Image& img, int quality) {
    std::vector<std::uint8_t> out;
    std::vector<int> params = {cv::IMWRITE_JPEG_QUALITY, quality};
    if (!cv::imencode(".jpg", to_mat(img), out, params)) throw Error("jpeg encode failed");
    return out;
}

std::vector<std::uint8_t> to_luma(const Image& img) {
    std::vector<std::uint8_t> gray(img.pixel_count());
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const double y = 0.299 * img.rgb[i * 3 + 0] + 0.587 * img.rgb[i * 3 + 1] +
                         0.114 * img.rgb[i * 3 + 2];
        gray[i] = static_cast<std::uint8_t>(std::lround(y));
    }
    return gray;
}

std::vector<float> resize_bilinear(const std::vector<std::uint8_t>& gray,
                                   int width, int height,
                                   int out_width, int out_height) {
    std::vector<float> out(static_cast<std::size_t>(out_width) * out_height);
    const double sx = static_cast<double>(width) / out_width;
    const double sy = static_cast<double>(height) / out_height;
    for (int oy = 0; oy < out_height; ++oy) {
        const double fy = (oy + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        const double wy = fy - y0;
        y0 = std::clamp(y0, 0, height - 1);
        const int y1 = std::clamp(y0 + 1, 0, height - 1);
        for (int ox = 0; ox < out_width; ++ox) {
            const double fx = (ox + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            const double wx = fx - x0;
            x0 = std::clamp(x0, 0, width - 1);
            const int x1 = std::clamp(x0 + 1, 0, width - 1);
            const double top = gray[static_cast<std::size_t>(y0) * width + x0] * (1.0 - wx) +
                               gray[static_cast<std::size_t>(y0) * width + x1] * wx;
            const double bot = gray[static_cast<std::size_t>(y1) * width + x0] * (1.0 - wx) +
                               gray[static_cast<std::size_t>(y1) * width + x1] * wx;
            out[static_cast<std::size_t>(oy) * out_width + ox] =
                static_cast<float>(top * (1.0 - wy) + bot * wy);
        }
    }
    return out;
}

Image resize_rgb(const Image& img, int out_width, int out_height) {
    if (img.width == out_width && img.height == out_height) return img;
    Image out;
    out.width = out_width;
    out.height = out_height;
    out.rgb.resize(static_cast<std::size_t>(out_width) * out_height * 3);
    const double sx = static_cast<double>(img.width) / out_width;
    const double sy = static_cast<double>(img.height) / out_height;
    for (int oy = 0; oy < out_height; ++oy) {
        const double fy = (oy + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        const double wy = fy - y0;
        y0 = std::clamp(y0, 0, img.height - 1);
        const int y1 = std::clamp(y0 + 1, 0, img.height - 1);
        for (int ox = 0; ox < out_width; ++ox) {
            const double fx = (ox + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            const double wx = fx - x0;
            x0 = std::clamp(x0, 0, img.width - 1);
            const int x1 = std::clamp(x0 + 1, 0, img.width - 1);
            for (int c = 0; c < 3; ++c) {
                const double v00 = img.rgb[(static_cast<std::size_t>(y0) * img.width + x0) * 3 + c];
                const double v01 = img.rgb[(static_cast<std::size_t>(y0) * img.width + x1) * 3 + c];
                const double v10 = img.rgb[(static_cast<std::size_t>(y1) * img.width + x0) * 3 + c];
                const double v11 = img.rgb[(static_cast<std::size_t>(y1) * img.width + x1) * 3 + c];
                const double v = (v00 * (1.0 - wx) + v01 * wx) * (1.0 - wy) +
                                 (v10 * (1.0 - wx) + v11 * wx) * wy;
                out.rgb[(static_cast<std::size_t>(oy) * out_width + ox) * 3 + c] =
                    static_cast<std::uint8_t>(std::lround(v));
            }
        }
    }
    return out;
}

}  // namespace facaderisk
