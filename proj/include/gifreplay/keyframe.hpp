#pragma once

// Consecutive-frame similarity series, activity segmentation, and keyframe
// extraction. A recording is cut into instantaneous transitions, animation
// transitions, and steady states; each steady state contributes exactly one
// keyframe (its last, most fully rendered frame).

#include <string>
#include <vector>

#include "gifreplay/error.hpp"
#include "gifreplay/media.hpp"
#include "gifreplay/parallel.hpp"
#include "gifreplay/ssim.hpp"

namespace gifreplay {

struct SimilaritySeries {
    std::vector<SimilarityScore> scores;  // scores[i] = ssim(Y_i, Y_{i+1})

    std::size_t size() const { return scores.size(); }
    double operator[](std::size_t i) const { return scores[i].value; }

    static SimilaritySeries from_values(std::vector<double> values) {
        SimilaritySeries s;
        s.scores.reserve(values.size());
        for (double v : values) s.scores.push_back(SimilarityScore{v});
        return s;
    }
};

struct SegmentationConfig {
    double sim_threshold = 0.95;
    int steady_min_frames = 5;
    // Longest run of similar scores still absorbed into an enclosing
    // transition as a mid-load plateau. Defaults to steady_min_frames - 1.
    int partial_render_max_frames = 4;

    void validate() const {
        if (!(sim_threshold > 0.0) || sim_threshold > 1.0)
            throw ContractError("SegmentationConfig: sim_threshold must be in (0, 1]");
        if (steady_min_frames < 2)
            throw ContractError("SegmentationConfig: steady_min_frames must be >= 2");
        if (partial_render_max_frames < 0 || partial_render_max_frames >= steady_min_frames)
            throw ContractError(
                "SegmentationConfig: partial_render_max_frames must be in [0, steady_min_frames)");
    }
};

enum class SegmentKind { InstantaneousTransition, AnimationTransition, Steady };

inline const char* to_string(SegmentKind k) {
    switch (k) {
        case SegmentKind::InstantaneousTransition: return "instantaneous_transition";
        case SegmentKind::AnimationTransition: return "animation_transition";
        case SegmentKind::Steady: return "steady";
    }
    return "?";
}

struct Segment {
    SegmentKind kind;
    int start;  // inclusive frame indices
    int end;
};

struct KeyframeSequence {
    std::vector<Frame> keyframes;  // strictly increasing frame indices
    std::string source;
    std::vector<std::string> warnings;

    std::vector<int> indices() const {
        std::vector<int> out;
        out.reserve(keyframes.size());
        for (const auto& f : keyframes) out.push_back(f.index);
        return out;
    }
};

// scores[i] = ssim(Y_i, Y_{i+1}); frame pairs are independent, so they are
// computed in parallel into fixed slots.
inline SimilaritySeries similarity_series(const Recording& rec, const SsimParams& params = {},
                                          int threads = 1) {
    if (rec.frames.size() < 2)
        throw ContractError("similarity_series: need at least 2 frames");

    std::vector<LuminanceMask> luma(rec.frames.size());
    parallel_for(rec.frames.size(), threads,
                 [&](std::size_t i) { luma[i] = to_luminance(rec.frames[i].raster); });

    SimilaritySeries series;
    series.scores.resize(rec.frames.size() - 1);
    parallel_for(series.scores.size(), threads,
                 [&](std::size_t i) { series.scores[i] = ssim(luma[i], luma[i + 1], params); });
    return series;
}

namespace detail {

struct ScoreRun {
    int begin;  // score indices, inclusive
    int end;
    bool similar;
};

inline std::vector<ScoreRun> score_runs(const SimilaritySeries& s, double threshold) {
    std::vector<ScoreRun> runs;
    const int n = static_cast<int>(s.size());
    int begin = 0;
    bool cur = s[0] >= threshold;
    for (int i = 1; i < n; ++i) {
        const bool similar = s[i] >= threshold;
        if (similar != cur) {
            runs.push_back({begin, i - 1, cur});
            begin = i;
            cur = similar;
        }
    }
    runs.push_back({begin, n - 1, cur});
    return runs;
}

// A transition is an animation when some three consecutive sub-threshold
// scores are non-decreasing (a slow climb back toward steady); otherwise it
// is an instantaneous cut. Absorbed plateaus are excluded from the test.
inline SegmentKind classify_transition(const SimilaritySeries& s, double threshold,
                                       int score_begin, int score_end) {
    for (int i = score_begin; i + 2 <= score_end; ++i) {
        bool all_sub = true;
        for (int j = i; j <= i + 2; ++j)
            if (s[j] >= threshold) all_sub = false;
        if (all_sub && s[i] <= s[i + 1] && s[i + 1] <= s[i + 2])
            return SegmentKind::AnimationTransition;
    }
    return SegmentKind::InstantaneousTransition;
}

}  // namespace detail

// Segments tile [0, N] (N = last frame index). A steady run of scores
// [i..j] claims frames [i..j+1]; the frames strictly between two steady
// claims form transition segments. Similar runs too short to be steady are
// absorbed into the enclosing transition when they are at most
// partial_render_max_frames long (the mid-load plateau); longer ones split
// the transition in two at the run's midpoint.
inline std::vector<Segment> segment(const SimilaritySeries& series,
                                    const SegmentationConfig& cfg = {}) {
    cfg.validate();
    if (series.size() == 0) throw ContractError("segment: empty similarity series");

    const int n = static_cast<int>(series.size());
    const int last_frame = n;  // frames are [0, n]

    const auto runs = detail::score_runs(series, cfg.sim_threshold);

    // Steady score runs, in order.
    struct SteadyRun {
        int begin, end;
    };
    std::vector<SteadyRun> steadies;
    for (const auto& r : runs)
        if (r.similar && r.end - r.begin + 1 >= cfg.steady_min_frames)
            steadies.push_back({r.begin, r.end});

    std::vector<Segment> segments;

    // Emits transition segment(s) for the frame range [fs..fe] whose score
    // range is [ss..se], honoring plateau splits.
    auto emit_transitions = [&](int fs, int fe, int ss, int se) {
        if (fs > fe) return;
        // Oversized similar runs inside the gap split it.
        std::vector<int> splits;  // frame indices where a new segment starts
        for (const auto& r : runs) {
            if (!r.similar || r.begin < ss || r.end > se) continue;
            const int len = r.end - r.begin + 1;
            if (len >= cfg.steady_min_frames || len <= cfg.partial_render_max_frames) continue;
            const int mid = (r.begin + r.end + 2) / 2;
            if (mid > fs && mid <= fe) splits.push_back(mid);
        }
        int seg_fs = fs;
        int seg_ss = ss;
        auto flush = [&](int seg_fe, int seg_se) {
            if (seg_fs > seg_fe) return;
            segments.push_back(Segment{
                detail::classify_transition(series, cfg.sim_threshold, seg_ss, seg_se),
                seg_fs, seg_fe});
        };
        for (int split : splits) {
            flush(split - 1, std::min(se, split - 1));
            seg_fs = split;
            seg_ss = std::min(se, split);
        }
        flush(fe, se);
    };

    int next_frame = 0;  // first frame not yet assigned
    int next_score = 0;
    for (const auto& st : steadies) {
        emit_transitions(next_frame, st.begin - 1, next_score, st.begin - 1);
        segments.push_back(Segment{SegmentKind::Steady, st.begin, st.end + 1});
        next_frame = st.end + 2;
        next_score = st.end + 1;
    }
    emit_transitions(next_frame, last_frame, next_score, n - 1);

    return segments;
}

// One keyframe per steady segment: its last frame. Consecutive steady
// segments whose facing frames still look alike are merged first so a
// duplicated screen does not produce two keyframes.
inline KeyframeSequence locate_keyframes(const Recording& rec, const std::vector<Segment>& segs,
                                         const SegmentationConfig& cfg = {},
                                         const SsimParams& ssim_params = {}) {
    KeyframeSequence out;
    out.source = rec.source_path;

    if (rec.frames.size() == 1) {
        out.keyframes.push_back(rec.frames.front());
        return out;
    }

    // Merge pass over steady segments.
    std::vector<Segment> merged;
    for (const auto& seg : segs) {
        if (seg.kind == SegmentKind::Steady && !merged.empty() &&
            merged.back().kind == SegmentKind::Steady && merged.back().end + 1 == seg.start) {
            const auto& prev_frame = rec.frames[merged.back().end];
            const auto& next_frame = rec.frames[seg.start];
            const double s =
                ssim(to_luminance(prev_frame.raster), to_luminance(next_frame.raster), ssim_params)
                    .value;
            if (s >= cfg.sim_threshold) {
                merged.back().end = seg.end;
                continue;
            }
        }
        merged.push_back(seg);
    }

    for (const auto& seg : merged)
        if (seg.kind == SegmentKind::Steady)
            out.keyframes.push_back(rec.frames[seg.end]);

    if (out.keyframes.empty())
        out.warnings.push_back("no steady segment found; recording yields no keyframes");
    else if (!merged.empty() && merged.back().kind != SegmentKind::Steady)
        out.warnings.push_back(
            "recording ends mid-transition; trailing frames produced no keyframe");

    return out;
}

// Convenience: full phase-one pass.
inline KeyframeSequence extract_keyframes(const Recording& rec, const SsimParams& ssim_params = {},
                                          const SegmentationConfig& cfg = {}, int threads = 1) {
    if (rec.frames.empty()) throw EmptyInputError("extract_keyframes: empty recording");
    if (rec.frames.size() == 1) return locate_keyframes(rec, {}, cfg, ssim_params);
    const auto series = similarity_series(rec, ssim_params, threads);
    const auto segs = segment(series, cfg);
    return locate_keyframes(rec, segs, cfg, ssim_params);
}

}  // namespace gifreplay
