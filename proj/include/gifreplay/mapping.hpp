#pragma once

// GUI mapping: each keyframe is scored against every UTG screenshot with
// s_comb = w * s_orb + (1 - w) * s_ssim and the ranked top-k is kept; the
// rank-1 nodes form the index sequence consumed by trace generation.

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gifreplay/error.hpp"
#include "gifreplay/features.hpp"
#include "gifreplay/image.hpp"
#include "gifreplay/keyframe.hpp"
#include "gifreplay/parallel.hpp"
#include "gifreplay/ssim.hpp"
#include "gifreplay/utg.hpp"

namespace gifreplay {

struct MappingConfig {
    double w = 0.5;        // weight of s_orb
    int top_k = 3;
    double min_score = 0.0;  // 0 disables the floor
    int max_hamming = 64;

    void validate() const {
        if (w < 0.0 || w > 1.0) throw ContractError("MappingConfig: w must be in [0, 1]");
        if (top_k < 1) throw ContractError("MappingConfig: top_k must be >= 1");
    }
};

struct CombinedScore {
    double comb = 0.0;
    double ssim = 0.0;
    double orb = 0.0;
};

struct RankedCandidate {
    std::string node;
    double s_comb;
    double s_ssim;
    double s_orb;
};

struct MappingResult {
    int keyframe_index = 0;
    std::vector<RankedCandidate> ranked;  // descending s_comb, ties by node id
};

struct IndexSequence {
    std::vector<std::string> indices;  // rank-1 node per kept keyframe
    std::vector<MappingResult> results;
    std::vector<std::string> warnings;
};

// Scores one keyframe raster against one reference luminance mask. The
// keyframe is resampled to the reference's dimensions first; both the
// structural and the local-feature scores are computed on that pair. An
// empty feature set on either side zeroes s_orb and leaves s_ssim to carry
// the comparison.
inline CombinedScore combined_similarity(const Image& keyframe, const LuminanceMask& reference,
                                         const FeatureSet& reference_features, double w,
                                         const SsimParams& ssim_params = {},
                                         const FeatureParams& feat_params = {},
                                         int max_hamming = 64) {
    const Image resized = resize_bilinear(keyframe, reference.width, reference.height);
    const LuminanceMask luma = to_luminance(resized);
    const double s_ssim = ssim(luma, reference, ssim_params).value;
    const FeatureSet kf_features = detect_and_describe(luma, feat_params);
    const double s_orb = orb_similarity(kf_features, reference_features, max_hamming).value;
    CombinedScore s;
    s.ssim = s_ssim;
    s.orb = s_orb;
    s.comb = w * s_orb + (1.0 - w) * s_ssim;
    return s;
}

inline CombinedScore combined_similarity(const Image& a, const Image& b, double w,
                                         const SsimParams& ssim_params = {},
                                         const FeatureParams& feat_params = {},
                                         int max_hamming = 64) {
    const LuminanceMask reference = to_luminance(b);
    const FeatureSet feats = detect_and_describe(reference, feat_params);
    return combined_similarity(a, reference, feats, w, ssim_params, feat_params, max_hamming);
}

// Maps every keyframe to its ranked nearest UTG screenshots. Node features
// are extracted once and reused across keyframes; keyframe features are
// cached per target resolution. All pairwise scores land in preallocated
// slots, so the output does not depend on the thread count.
inline IndexSequence map_keyframes(const KeyframeSequence& kfs, const Utg& g,
                                   const MappingConfig& cfg = {},
                                   const SsimParams& ssim_params = {},
                                   const FeatureParams& feat_params = {}, int threads = 1) {
    cfg.validate();
    if (g.nodes.empty()) throw ContractError("map_keyframes: UTG has no nodes");

    IndexSequence out;
    if (kfs.keyframes.empty()) return out;

    // Stable node order.
    std::vector<const UtgNode*> nodes;
    nodes.reserve(g.nodes.size());
    for (const auto& [id, node] : g.nodes) nodes.push_back(&node);

    std::vector<FeatureSet> node_features(nodes.size());
    parallel_for(nodes.size(), threads, [&](std::size_t i) {
        node_features[i] = detect_and_describe(nodes[i]->screenshot, feat_params);
    });

    // Distinct reference resolutions (usually exactly one).
    std::vector<std::pair<int, int>> dims;
    std::map<std::pair<int, int>, std::size_t> dim_index;
    for (const auto* n : nodes) {
        const std::pair<int, int> d{n->screenshot.width, n->screenshot.height};
        if (dim_index.emplace(d, dims.size()).second) dims.push_back(d);
    }

    // Keyframe lumas and features per (keyframe, resolution).
    const std::size_t kf_count = kfs.keyframes.size();
    std::vector<LuminanceMask> kf_luma(kf_count * dims.size());
    std::vector<FeatureSet> kf_features(kf_count * dims.size());
    parallel_for(kf_count * dims.size(), threads, [&](std::size_t slot) {
        const std::size_t k = slot / dims.size();
        const auto [w, h] = dims[slot % dims.size()];
        kf_luma[slot] = to_luminance(resize_bilinear(kfs.keyframes[k].raster, w, h));
        kf_features[slot] = detect_and_describe(kf_luma[slot], feat_params);
    });

    std::vector<CombinedScore> scores(kf_count * nodes.size());
    parallel_for(scores.size(), threads, [&](std::size_t slot) {
        const std::size_t k = slot / nodes.size();
        const std::size_t n = slot % nodes.size();
        const auto* node = nodes[n];
        const std::size_t prep = k * dims.size() +
                                 dim_index.at({node->screenshot.width, node->screenshot.height});
        CombinedScore s;
        s.ssim = ssim(kf_luma[prep], node->screenshot, ssim_params).value;
        s.orb = orb_similarity(kf_features[prep], node_features[n], cfg.max_hamming).value;
        s.comb = cfg.w * s.orb + (1.0 - cfg.w) * s.ssim;
        scores[slot] = s;
    });

    for (std::size_t k = 0; k < kf_count; ++k) {
        MappingResult res;
        res.keyframe_index = kfs.keyframes[k].index;
        std::vector<RankedCandidate> all;
        all.reserve(nodes.size());
        for (std::size_t n = 0; n < nodes.size(); ++n) {
            const auto& s = scores[k * nodes.size() + n];
            all.push_back(RankedCandidate{nodes[n]->id, s.comb, s.ssim, s.orb});
        }
        std::stable_sort(all.begin(), all.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
            if (a.s_comb != b.s_comb) return a.s_comb > b.s_comb;
            return a.node < b.node;
        });
        if (static_cast<int>(all.size()) > cfg.top_k) all.resize(cfg.top_k);
        res.ranked = std::move(all);

        if (cfg.min_score > 0.0 && res.ranked.front().s_comb < cfg.min_score) {
            out.warnings.push_back("keyframe " + std::to_string(res.keyframe_index) +
                                   " dropped: best score " +
                                   std::to_string(res.ranked.front().s_comb) + " below min_score");
            continue;
        }
        out.indices.push_back(res.ranked.front().node);
        out.results.push_back(std::move(res));
    }
    return out;
}

}  // namespace gifreplay
