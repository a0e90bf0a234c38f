#pragma once

// Local-feature path of GUI mapping: FAST-style segment-test corners over a
// small image pyramid, 256-bit intensity-comparison descriptors sampled from
// a seeded pair table on a blurred patch, and brute-force Hamming matching
// with a mutual-best cross check. Screens are always upright, so there is no
// orientation assignment; detection is sequential and fully deterministic.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <vector>

#include "gifreplay/image.hpp"
#include "gifreplay/prng.hpp"
#include "gifreplay/ssim.hpp"

namespace gifreplay {

struct FeatureParams {
    int fast_threshold = 20;
    int circle_arc_min = 9;    // contiguous circle pixels (of 16) for a corner
    int max_keypoints = 500;
    int n_bits = 256;
    int patch_size = 31;
    int pyramid_levels = 4;
    double pyramid_scale = 1.2;
    std::uint64_t sampler_seed = 0xb17e5u;

    int patch_radius() const { return patch_size / 2; }

    void validate() const {
        if (fast_threshold < 1 || circle_arc_min < 1 || circle_arc_min > 16 ||
            max_keypoints < 1 || n_bits < 1 || patch_size < 3 || pyramid_levels < 1 ||
            pyramid_scale <= 1.0)
            throw ContractError("FeatureParams: invalid value");
    }
};

struct InterestPoint {
    double x = 0, y = 0;  // level-0 coordinates
    int octave = 0;
    double response = 0;
};

struct BinaryDescriptor {
    std::vector<std::uint64_t> words;
    int n_bits = 0;

    void set_bit(int i) { words[i >> 6] |= std::uint64_t{1} << (i & 63); }

    int hamming(const BinaryDescriptor& o) const {
        int d = 0;
        for (std::size_t i = 0; i < words.size(); ++i)
            d += std::popcount(words[i] ^ o.words[i]);
        return d;
    }
};

struct FeatureSet {
    std::vector<InterestPoint> points;
    std::vector<BinaryDescriptor> descriptors;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

struct FeatureMatch {
    int index_a;
    int index_b;
    int distance;
};

namespace detail {

// Bresenham circle of radius 3, clockwise from 12 o'clock.
inline constexpr std::array<std::array<int, 2>, 16> kCircle = {{{0, -3},
                                                                {1, -3},
                                                                {2, -2},
                                                                {3, -1},
                                                                {3, 0},
                                                                {3, 1},
                                                                {2, 2},
                                                                {1, 3},
                                                                {0, 3},
                                                                {-1, 3},
                                                                {-2, 2},
                                                                {-3, 1},
                                                                {-3, 0},
                                                                {-3, -1},
                                                                {-2, -2},
                                                                {-1, -3}}};

// Integer Gaussian (sigma ~2), weights sum to exactly 4096.
inline constexpr std::array<int, 9> kBlurKernel = {113, 272, 507, 738, 836, 738, 507, 272, 113};

inline LuminanceMask gaussian_blur(const LuminanceMask& src) {
    const int w = src.width, h = src.height;
    std::vector<std::uint32_t> tmp(static_cast<std::size_t>(w) * h);
    LuminanceMask dst(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint32_t acc = 0;
            for (int k = -4; k <= 4; ++k) {
                const int xx = std::clamp(x + k, 0, w - 1);
                acc += static_cast<std::uint32_t>(kBlurKernel[k + 4]) * src.at(xx, y);
            }
            tmp[static_cast<std::size_t>(y) * w + x] = (acc + 2048) >> 12;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint32_t acc = 0;
            for (int k = -4; k <= 4; ++k) {
                const int yy = std::clamp(y + k, 0, h - 1);
                acc += static_cast<std::uint32_t>(kBlurKernel[k + 4]) *
                       tmp[static_cast<std::size_t>(yy) * w + x];
            }
            dst.at(x, y) = static_cast<std::uint8_t>((acc + 2048) >> 12);
        }
    }
    return dst;
}

inline LuminanceMask resize_luma(const LuminanceMask& src, int out_w, int out_h) {
    Image tmp(src.width, src.height);
    for (std::size_t i = 0; i < src.pixels.size(); ++i) {
        tmp.pixels[i * 3] = src.pixels[i];
        tmp.pixels[i * 3 + 1] = src.pixels[i];
        tmp.pixels[i * 3 + 2] = src.pixels[i];
    }
    const Image scaled = resize_bilinear(tmp, out_w, out_h);
    LuminanceMask out(out_w, out_h);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) out.pixels[i] = scaled.pixels[i * 3];
    return out;
}

// Segment test: does the circle around (x, y) contain >= arc_min contiguous
// pixels that are all brighter than center+t or all darker than center-t?
// Returns the corner response (sum of |difference| over circle pixels
// exceeding the threshold), or 0 when not a corner.
inline int fast_response(const LuminanceMask& img, int x, int y, int t, int arc_min) {
    const int center = img.at(x, y);
    std::array<int, 16> diff;
    for (int i = 0; i < 16; ++i)
        diff[i] = static_cast<int>(img.at(x + kCircle[i][0], y + kCircle[i][1])) - center;

    auto has_arc = [&](auto pred) {
        int run = 0;
        // Scan twice around the ring to catch wrapping arcs.
        for (int i = 0; i < 32; ++i) {
            if (pred(diff[i & 15])) {
                if (++run >= arc_min) return true;
            } else {
                run = 0;
            }
        }
        return false;
    };

    const bool corner = has_arc([&](int d) { return d > t; }) ||
                        has_arc([&](int d) { return d < -t; });
    if (!corner) return 0;

    int response = 0;
    for (int d : diff)
        if (d > t || d < -t) response += d > 0 ? d : -d;
    return response;
}

struct SamplingPair {
    int x1, y1, x2, y2;
};

// Seeded table of descriptor sampling pairs within the patch.
inline std::vector<SamplingPair> make_sampling_pairs(const FeatureParams& p) {
    SplitMix64 rng(p.sampler_seed);
    const int r = p.patch_radius();
    std::vector<SamplingPair> pairs;
    pairs.reserve(p.n_bits);
    while (static_cast<int>(pairs.size()) < p.n_bits) {
        SamplingPair s;
        s.x1 = rng.next_int(-r, r);
        s.y1 = rng.next_int(-r, r);
        s.x2 = rng.next_int(-r, r);
        s.y2 = rng.next_int(-r, r);
        if (s.x1 == s.x2 && s.y1 == s.y2) continue;
        pairs.push_back(s);
    }
    return pairs;
}

}  // namespace detail

// Detects corners on each pyramid level, keeps 3x3 local maxima, ranks all
// candidates by response, and describes the strongest max_keypoints of them
// on the blurred level image. Images smaller than the descriptor patch
// yield an empty set, which downstream code treats as "no local features,
// fall back to structural similarity alone".
inline FeatureSet detect_and_describe(const LuminanceMask& img, const FeatureParams& params = {}) {
    params.validate();
    FeatureSet out;
    if (img.width < params.patch_size || img.height < params.patch_size) return out;

    const auto pairs = detail::make_sampling_pairs(params);
    const int radius = params.patch_radius();

    struct Candidate {
        int x, y, level;
        double scale;
        int response;
    };
    std::vector<Candidate> candidates;

    LuminanceMask level = img;
    double scale = 1.0;
    std::vector<LuminanceMask> blurred_levels;
    std::vector<double> level_scales;

    for (int levi = 0; levi < params.pyramid_levels; ++levi) {
        if (levi > 0) {
            scale *= params.pyramid_scale;
            const int w = static_cast<int>(img.width / scale + 0.5);
            const int h = static_cast<int>(img.height / scale + 0.5);
            if (w < params.patch_size || h < params.patch_size) break;
            level = detail::resize_luma(img, w, h);
        }
        blurred_levels.push_back(detail::gaussian_blur(level));
        level_scales.push_back(scale);

        const int margin = std::max(radius, 3);
        std::vector<int> response(static_cast<std::size_t>(level.width) * level.height, 0);
        for (int y = margin; y < level.height - margin; ++y)
            for (int x = margin; x < level.width - margin; ++x)
                response[static_cast<std::size_t>(y) * level.width + x] = detail::fast_response(
                    level, x, y, params.fast_threshold, params.circle_arc_min);

        for (int y = margin; y < level.height - margin; ++y) {
            for (int x = margin; x < level.width - margin; ++x) {
                const int r = response[static_cast<std::size_t>(y) * level.width + x];
                if (r == 0) continue;
                bool is_max = true;
                for (int dy = -1; dy <= 1 && is_max; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int other =
                            response[static_cast<std::size_t>(y + dy) * level.width + (x + dx)];
                        // Strict on earlier-scanned neighbors breaks plateaus
                        // deterministically toward the first pixel.
                        if (other > r || (other == r && (dy < 0 || (dy == 0 && dx < 0)))) {
                            is_max = false;
                            break;
                        }
                    }
                if (is_max) candidates.push_back({x, y, levi, scale, r});
            }
        }
    }

    std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.response != b.response) return a.response > b.response;
        if (a.level != b.level) return a.level < b.level;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    if (static_cast<int>(candidates.size()) > params.max_keypoints)
        candidates.resize(params.max_keypoints);

    out.points.reserve(candidates.size());
    out.descriptors.reserve(candidates.size());
    const int words = (params.n_bits + 63) / 64;
    for (const auto& c : candidates) {
        const LuminanceMask& smooth = blurred_levels[c.level];
        BinaryDescriptor d;
        d.n_bits = params.n_bits;
        d.words.assign(words, 0);
        for (int b = 0; b < params.n_bits; ++b) {
            const auto& sp = pairs[b];
            const std::uint8_t va = smooth.at(c.x + sp.x1, c.y + sp.y1);
            const std::uint8_t vb = smooth.at(c.x + sp.x2, c.y + sp.y2);
            if (va < vb) d.set_bit(b);
        }
        out.points.push_back(InterestPoint{c.x * c.scale, c.y * c.scale, c.level,
                                           static_cast<double>(c.response)});
        out.descriptors.push_back(std::move(d));
    }
    return out;
}

// Brute-force nearest neighbor by Hamming distance with a mutual-best cross
// check. Ties break toward the lower candidate index, which keeps the
// result symmetric: match(a, b) is the transpose of match(b, a).
inline std::vector<FeatureMatch> match(const FeatureSet& a, const FeatureSet& b, int max_hamming) {
    std::vector<FeatureMatch> out;
    if (a.empty() || b.empty()) return out;

    auto nearest = [](const FeatureSet& from, const FeatureSet& to, std::size_t i) {
        int best = INT32_MAX;
        int best_j = -1;
        for (std::size_t j = 0; j < to.size(); ++j) {
            const int d = from.descriptors[i].hamming(to.descriptors[j]);
            if (d < best) {
                best = d;
                best_j = static_cast<int>(j);
            }
        }
        return std::pair<int, int>(best_j, best);
    };

    std::vector<int> best_in_b(a.size());
    std::vector<int> dist_ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto [j, d] = nearest(a, b, i);
        best_in_b[i] = j;
        dist_ab[i] = d;
    }
    std::vector<int> best_in_a(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) best_in_a[j] = nearest(b, a, j).first;

    for (std::size_t i = 0; i < a.size(); ++i) {
        const int j = best_in_b[i];
        if (j >= 0 && dist_ab[i] <= max_hamming &&
            best_in_a[static_cast<std::size_t>(j)] == static_cast<int>(i))
            out.push_back(FeatureMatch{static_cast<int>(i), j, dist_ab[i]});
    }
    return out;
}

// S_orb: surviving matches normalized by the smaller keypoint budget, so two
// identical images score 1 even when their keypoint counts differ.
inline SimilarityScore orb_similarity(const FeatureSet& a, const FeatureSet& b, int max_hamming) {
    if (a.empty() || b.empty()) return SimilarityScore{0.0};
    const auto matches = match(a, b, max_hamming);
    const double denom = static_cast<double>(std::max<std::size_t>(1, std::min(a.size(), b.size())));
    return SimilarityScore{std::clamp(matches.size() / denom, 0.0, 1.0)};
}

}  // namespace gifreplay
