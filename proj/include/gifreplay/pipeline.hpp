#pragma once

// End-to-end orchestration shared by the CLI and the benchmark: decode the
// recording, locate keyframes, map them onto the UTG, generate the trace,
// and time each phase. Artifacts serialize to plain JSON so every phase can
// be rerun on its own.

#include <chrono>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gifreplay/error.hpp"
#include "gifreplay/keyframe.hpp"
#include "gifreplay/mapping.hpp"
#include "gifreplay/media.hpp"
#include "gifreplay/trace.hpp"
#include "gifreplay/utg.hpp"

namespace gifreplay {

struct RunConfig {
    SsimParams ssim;
    SegmentationConfig seg;
    FeatureParams feat;
    MappingConfig map;
    PathLimits limits;
    int threads = 1;
    std::optional<std::pair<int, int>> resize_to;

    void validate() const {
        ssim.validate();
        seg.validate();
        feat.validate();
        map.validate();
        if (threads < 1) throw ContractError("RunConfig: threads must be >= 1");
    }
};

struct PhaseTimings {
    double recording_duration_sec = 0.0;  // media time, not wall clock
    double keyframe_location_sec = 0.0;
    double gui_mapping_sec = 0.0;
    double trace_generation_sec = 0.0;

    double total_sec() const {
        return keyframe_location_sec + gui_mapping_sec + trace_generation_sec;
    }
};

struct PipelineResult {
    KeyframeSequence keyframes;
    IndexSequence mapping;
    std::optional<ExecutionTrace> trace;
    std::string trace_error;  // set when trace generation failed
    PhaseTimings timings;
};

namespace detail {

class PhaseClock {
public:
    PhaseClock() : start_(std::chrono::steady_clock::now()) {}
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const std::chrono::duration<double> d = now - start_;
        start_ = now;
        return d.count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

// Runs phases two and three on an already-decoded recording. Keyframe
// location timing starts here; callers that decode from disk fold the
// decode time into keyframe_location_sec themselves.
inline PipelineResult run_pipeline(const Recording& rec, const Utg& g, const RunConfig& cfg) {
    cfg.validate();
    PipelineResult out;
    out.timings.recording_duration_sec = rec.duration_seconds();

    detail::PhaseClock clock;
    out.keyframes = extract_keyframes(rec, cfg.ssim, cfg.seg, cfg.threads);
    out.timings.keyframe_location_sec = clock.lap();

    out.mapping = map_keyframes(out.keyframes, g, cfg.map, cfg.ssim, cfg.feat, cfg.threads);
    out.timings.gui_mapping_sec = clock.lap();

    if (!out.mapping.indices.empty()) {
        try {
            out.trace = generate_trace(out.mapping.indices, g, cfg.limits);
        } catch (const UnreachableError& e) {
            out.trace_error = e.what();
        }
    } else {
        out.trace_error = "no mapped keyframes; trace generation skipped";
    }
    out.timings.trace_generation_sec = clock.lap();
    return out;
}

// Decodes the recording from disk first; decode time counts as part of the
// keyframe location phase, mirroring how the phases are reported.
inline PipelineResult run_pipeline_on_files(const std::string& recording_path, const Utg& g,
                                            const RunConfig& cfg) {
    detail::PhaseClock clock;
    const Recording rec = load_recording(recording_path, cfg.resize_to);
    const double decode_sec = clock.lap();
    PipelineResult out = run_pipeline(rec, g, cfg);
    out.timings.keyframe_location_sec += decode_sec;
    return out;
}

// --- artifact serialization ------------------------------------------------

inline nlohmann::json keyframes_to_json(const KeyframeSequence& kfs, const Recording& rec) {
    nlohmann::json j;
    j["source"] = kfs.source;
    j["keyframes"] = nlohmann::json::array();
    for (const auto& f : kfs.keyframes)
        j["keyframes"].push_back({{"index", f.index}, {"time_ms", rec.time_ms_of(f.index)}});
    j["warnings"] = kfs.warnings;
    return j;
}

inline nlohmann::json mapping_to_json(const IndexSequence& seq) {
    nlohmann::json j;
    j["indices"] = seq.indices;
    j["results"] = nlohmann::json::array();
    for (const auto& r : seq.results) {
        nlohmann::json ranked = nlohmann::json::array();
        for (const auto& c : r.ranked)
            ranked.push_back({{"node", c.node},
                              {"s_comb", c.s_comb},
                              {"s_ssim", c.s_ssim},
                              {"s_orb", c.s_orb}});
        j["results"].push_back({{"keyframe", r.keyframe_index}, {"ranked", std::move(ranked)}});
    }
    j["warnings"] = seq.warnings;
    return j;
}

inline nlohmann::json trace_to_json(const ExecutionTrace& t) {
    nlohmann::json j;
    j["trace"] = t.path.nodes;
    nlohmann::json actions = nlohmann::json::array();
    for (const auto& e : t.path.edges) actions.push_back(e.action);
    j["actions"] = std::move(actions);
    j["lcs"] = t.lcs;
    j["covered"] = t.covered;
    return j;
}

inline nlohmann::json timings_to_json(const PhaseTimings& t) {
    return nlohmann::json{{"recording_duration_sec", t.recording_duration_sec},
                          {"keyframe_location_sec", t.keyframe_location_sec},
                          {"gui_mapping_sec", t.gui_mapping_sec},
                          {"trace_generation_sec", t.trace_generation_sec},
                          {"total_sec", t.total_sec()}};
}

inline void write_json_file(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DecodeError("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

// --- config file -----------------------------------------------------------

// Optional JSON config; every key mirrors a CLI flag and missing keys keep
// their defaults.
inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DecodeError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError("config file is not valid JSON: " + path + ": " + e.what());
    }

    RunConfig cfg;
    cfg.ssim.window = j.value("ssim_window", cfg.ssim.window);
    cfg.ssim.stride = j.value("ssim_stride", cfg.ssim.stride);
    cfg.ssim.k1 = j.value("ssim_k1", cfg.ssim.k1);
    cfg.ssim.k2 = j.value("ssim_k2", cfg.ssim.k2);
    cfg.seg.sim_threshold = j.value("sim_threshold", cfg.seg.sim_threshold);
    cfg.seg.steady_min_frames = j.value("steady_frames", cfg.seg.steady_min_frames);
    cfg.seg.partial_render_max_frames =
        j.value("partial_render_max_frames", cfg.seg.partial_render_max_frames);
    cfg.feat.fast_threshold = j.value("fast_threshold", cfg.feat.fast_threshold);
    cfg.feat.max_keypoints = j.value("max_keypoints", cfg.feat.max_keypoints);
    cfg.feat.n_bits = j.value("descriptor_bits", cfg.feat.n_bits);
    cfg.feat.pyramid_levels = j.value("pyramid_levels", cfg.feat.pyramid_levels);
    cfg.feat.pyramid_scale = j.value("pyramid_scale", cfg.feat.pyramid_scale);
    cfg.feat.sampler_seed = j.value("sampler_seed", cfg.feat.sampler_seed);
    cfg.map.w = j.value("w", cfg.map.w);
    cfg.map.top_k = j.value("top_k", cfg.map.top_k);
    cfg.map.min_score = j.value("min_score", cfg.map.min_score);
    cfg.map.max_hamming = j.value("max_hamming", cfg.map.max_hamming);
    cfg.limits.max_paths = j.value("max_paths", cfg.limits.max_paths);
    cfg.limits.max_depth = j.value("max_depth", cfg.limits.max_depth);
    cfg.threads = j.value("threads", cfg.threads);
    return cfg;
}

}  // namespace gifreplay
