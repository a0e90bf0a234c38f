#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gifreplay/error.hpp"

namespace gifreplay {

// Interleaved 8-bit RGB raster.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // width*height*3, row-major

    Image() = default;
    Image(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {}

    bool empty() const { return width == 0 || height == 0; }

    std::uint8_t* at(int x, int y) {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }
    const std::uint8_t* at(int x, int y) const {
        return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3;
    }

    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = at(x, y);
        p[0] = r; p[1] = g; p[2] = b;
    }

    bool operator==(const Image& o) const {
        return width == o.width && height == o.height && pixels == o.pixels;
    }
};

// Single-channel Y (luma) image; the unit of all SSIM comparisons.
struct LuminanceMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // width*height, row-major

    LuminanceMask() = default;
    LuminanceMask(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t& at(int x, int y) {
        return pixels[static_cast<std::size_t>(y) * width + x];
    }

    bool operator==(const LuminanceMask& o) const {
        return width == o.width && height == o.height && pixels == o.pixels;
    }
};

// BT.601 full-range luma, rounded to the nearest integer.
inline std::uint8_t luma601(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    const long v = std::lround(y);
    return static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
}

inline LuminanceMask to_luminance(const Image& img) {
    LuminanceMask m(img.width, img.height);
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = img.pixels.data() + i * 3;
        m.pixels[i] = luma601(p[0], p[1], p[2]);
    }
    return m;
}

// Bilinear resample. Degenerate 1-pixel rows/columns clamp to the edge.
inline Image resize_bilinear(const Image& src, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1)
        throw ContractError("resize_bilinear: target dimensions must be >= 1");
    if (src.empty())
        throw ContractError("resize_bilinear: empty source image");
    if (src.width == out_w && src.height == out_h) return src;

    Image dst(out_w, out_h);
    const double sx = static_cast<double>(src.width) / out_w;
    const double sy = static_cast<double>(src.height) / out_h;
    for (int y = 0; y < out_h; ++y) {
        // Pixel-center mapping keeps content aligned under up/down scaling.
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(src.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, src.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(src.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, src.width - 1);
            const double wx = fx - x0;
            const std::uint8_t* p00 = src.at(x0, y0);
            const std::uint8_t* p10 = src.at(x1, y0);
            const std::uint8_t* p01 = src.at(x0, y1);
            const std::uint8_t* p11 = src.at(x1, y1);
            std::uint8_t* out = dst.at(x, y);
            for (int c = 0; c < 3; ++c) {
                const double top = p00[c] + (p10[c] - p00[c]) * wx;
                const double bot = p01[c] + (p11[c] - p01[c]) * wx;
                const long v = std::lround(top + (bot - top) * wy);
                out[c] = static_cast<std::uint8_t>(std::clamp(v, 0L, 255L));
            }
        }
    }
    return dst;
}

}  // namespace gifreplay
