#pragma once

// Windowed SSIM over 8-bit luminance masks. Window moments are taken from
// integer integral images, so a given input pair always produces the same
// bits regardless of call order or thread count, and ssim(x, x) is exactly 1.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "gifreplay/error.hpp"
#include "gifreplay/image.hpp"

namespace gifreplay {

struct SimilarityScore {
    double value = 0.0;
};

struct SsimParams {
    int window = 8;
    int stride = 4;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;  // L

    double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }

    void validate() const {
        if (window < 1) throw ContractError("SsimParams: window must be >= 1");
        if (stride < 1) throw ContractError("SsimParams: stride must be >= 1");
        if (!(c1() > 0.0) || !(c2() > 0.0))
            throw ContractError("SsimParams: stabilizers must be positive");
    }
};

namespace detail {

// Summed-area table with a zero border row/column; all entries exact.
struct Integral {
    int w = 0, h = 0;
    std::vector<std::uint64_t> sum;

    std::uint64_t rect(int x0, int y0, int x1, int y1) const {  // half-open
        const std::size_t stride = static_cast<std::size_t>(w) + 1;
        return sum[static_cast<std::size_t>(y1) * stride + x1] -
               sum[static_cast<std::size_t>(y0) * stride + x1] -
               sum[static_cast<std::size_t>(y1) * stride + x0] +
               sum[static_cast<std::size_t>(y0) * stride + x0];
    }
};

// Builds integrals of a, a^2, b, b^2 and a*b in one pass.
inline void build_ssim_integrals(const LuminanceMask& a, const LuminanceMask& b,
                                 Integral& sa, Integral& saa, Integral& sb,
                                 Integral& sbb, Integral& sab) {
    const int w = a.width, h = a.height;
    const std::size_t stride = static_cast<std::size_t>(w) + 1;
    for (Integral* t : {&sa, &saa, &sb, &sbb, &sab}) {
        t->w = w;
        t->h = h;
        t->sum.assign(stride * (h + 1), 0);
    }
    for (int y = 0; y < h; ++y) {
        std::uint64_t row_a = 0, row_aa = 0, row_b = 0, row_bb = 0, row_ab = 0;
        const std::size_t prev = static_cast<std::size_t>(y) * stride;
        const std::size_t cur = prev + stride;
        for (int x = 0; x < w; ++x) {
            const std::uint64_t va = a.pixels[static_cast<std::size_t>(y) * w + x];
            const std::uint64_t vb = b.pixels[static_cast<std::size_t>(y) * w + x];
            row_a += va;
            row_aa += va * va;
            row_b += vb;
            row_bb += vb * vb;
            row_ab += va * vb;
            sa.sum[cur + x + 1] = sa.sum[prev + x + 1] + row_a;
            saa.sum[cur + x + 1] = saa.sum[prev + x + 1] + row_aa;
            sb.sum[cur + x + 1] = sb.sum[prev + x + 1] + row_b;
            sbb.sum[cur + x + 1] = sbb.sum[prev + x + 1] + row_bb;
            sab.sum[cur + x + 1] = sab.sum[prev + x + 1] + row_ab;
        }
    }
}

// Window origins: every stride-th position, plus a final flush-to-edge
// window so the right/bottom pixels are always covered.
inline std::vector<int> window_origins(int extent, int window, int stride) {
    std::vector<int> origins;
    const int last = extent - window;
    for (int o = 0; o <= last; o += stride) origins.push_back(o);
    if (origins.empty() || origins.back() != last) origins.push_back(last);
    return origins;
}

}  // namespace detail

// Mean local SSIM over sliding windows (population variance, uniform
// window weights). Images smaller than the window fall back to a single
// window spanning the whole image. Raw local values live in [-1, 1]; the
// mean is clamped to [0, 1] at the end.
inline SimilarityScore ssim(const LuminanceMask& a, const LuminanceMask& b,
                            const SsimParams& params = {}) {
    params.validate();
    if (a.width != b.width || a.height != b.height)
        throw ContractError("ssim: dimension mismatch (" + std::to_string(a.width) + "x" +
                            std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                            std::to_string(b.height) + ")");
    if (a.width < 1 || a.height < 1) throw ContractError("ssim: empty image");

    const int win_w = std::min(params.window, a.width);
    const int win_h = std::min(params.window, a.height);

    detail::Integral sa, saa, sb, sbb, sab;
    detail::build_ssim_integrals(a, b, sa, saa, sb, sbb, sab);

    const auto xs = detail::window_origins(a.width, win_w, params.stride);
    const auto ys = detail::window_origins(a.height, win_h, params.stride);
    const double n = static_cast<double>(win_w) * win_h;
    const double c1 = params.c1();
    const double c2 = params.c2();

    double total = 0.0;
    for (const int y : ys) {
        for (const int x : xs) {
            const double s1a = static_cast<double>(sa.rect(x, y, x + win_w, y + win_h));
            const double s2a = static_cast<double>(saa.rect(x, y, x + win_w, y + win_h));
            const double s1b = static_cast<double>(sb.rect(x, y, x + win_w, y + win_h));
            const double s2b = static_cast<double>(sbb.rect(x, y, x + win_w, y + win_h));
            const double s_ab = static_cast<double>(sab.rect(x, y, x + win_w, y + win_h));

            const double mu_a = s1a / n;
            const double mu_b = s1b / n;
            const double var_a = s2a / n - mu_a * mu_a;
            const double var_b = s2b / n - mu_b * mu_b;
            const double cov = s_ab / n - mu_a * mu_b;

            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
        }
    }

    const double mean = total / (static_cast<double>(xs.size()) * ys.size());
    return SimilarityScore{std::clamp(mean, 0.0, 1.0)};
}

}  // namespace gifreplay
