#pragma once

// Ground-truth formats and the three metric families used to benchmark the
// pipeline: interval-based precision/recall/F1 for keyframes, Precision@k
// for GUI mapping, and 2M/T similarity for traces, plus a dataset runner
// that aggregates them with per-phase wall-clock times.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gifreplay/error.hpp"
#include "gifreplay/pipeline.hpp"
#include "gifreplay/trace.hpp"

namespace gifreplay {

struct KeyframeGroundTruth {
    std::vector<std::pair<int, int>> intervals;  // inclusive, disjoint, sorted
};

struct MappingGroundTruth {
    std::vector<std::pair<int, std::string>> pairs;  // (interval ordinal, node id)
};

struct TraceGroundTruth {
    std::vector<std::vector<std::string>> traces;  // equally optimal sequences
};

struct PrfResult {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int tp = 0, fp = 0, fn = 0;
};

// A predicted frame inside a ground-truth interval is correct, but each
// interval credits only its first hit; later hits in the same interval and
// frames outside every interval are false positives, unhit intervals are
// false negatives.
inline PrfResult keyframe_prf(const std::vector<int>& predicted, const KeyframeGroundTruth& gt) {
    PrfResult r;
    std::vector<bool> hit(gt.intervals.size(), false);
    for (const int frame : predicted) {
        bool counted = false;
        for (std::size_t i = 0; i < gt.intervals.size(); ++i) {
            if (frame < gt.intervals[i].first || frame > gt.intervals[i].second) continue;
            if (hit[i]) {
                ++r.fp;  // second keyframe in one interval
            } else {
                hit[i] = true;
                ++r.tp;
            }
            counted = true;
            break;
        }
        if (!counted) ++r.fp;
    }
    for (const bool h : hit)
        if (!h) ++r.fn;

    r.precision = (r.tp + r.fp) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fp) : 0.0;
    r.recall = (r.tp + r.fn) > 0 ? static_cast<double>(r.tp) / (r.tp + r.fn) : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

// Fraction of ground-truth pairs whose node shows up in the top-k ranked
// candidates of the matching result. Ordinals without a result count as
// misses (and are reported through `warnings` when given).
inline double precision_at_k(const std::vector<MappingResult>& results,
                             const MappingGroundTruth& gt, int k,
                             std::vector<std::string>* warnings = nullptr) {
    if (gt.pairs.empty()) return 0.0;
    int hits = 0;
    for (const auto& [ordinal, node] : gt.pairs) {
        if (ordinal < 0 || ordinal >= static_cast<int>(results.size())) {
            if (warnings)
                warnings->push_back("ground-truth ordinal " + std::to_string(ordinal) +
                                    " has no mapping result; counted as a miss");
            continue;
        }
        const auto& ranked = results[static_cast<std::size_t>(ordinal)].ranked;
        const int depth = std::min<int>(k, static_cast<int>(ranked.size()));
        for (int i = 0; i < depth; ++i) {
            if (ranked[static_cast<std::size_t>(i)].node == node) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(gt.pairs.size());
}

// Best 2M/T similarity across the (possibly plural) ground-truth traces.
inline double trace_similarity(const std::vector<std::string>& predicted,
                               const TraceGroundTruth& gt) {
    double best = 0.0;
    for (const auto& truth : gt.traces)
        best = std::max(best, sequence_similarity(truth, predicted));
    return best;
}

// --- ground truth I/O --------------------------------------------------------

inline KeyframeGroundTruth load_keyframe_gt(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DecodeError("cannot open " + path);
    nlohmann::json j;
    in >> j;
    KeyframeGroundTruth gt;
    for (const auto& iv : j.at("intervals"))
        gt.intervals.push_back({iv.at(0).get<int>(), iv.at(1).get<int>()});
    return gt;
}

inline MappingGroundTruth load_mapping_gt(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DecodeError("cannot open " + path);
    nlohmann::json j;
    in >> j;
    MappingGroundTruth gt;
    for (const auto& p : j.at("pairs"))
        gt.pairs.push_back({p.at(0).get<int>(), p.at(1).get<std::string>()});
    return gt;
}

inline TraceGroundTruth load_trace_gt(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DecodeError("cannot open " + path);
    nlohmann::json j;
    in >> j;
    TraceGroundTruth gt;
    for (const auto& t : j.at("traces")) gt.traces.push_back(t.get<std::vector<std::string>>());
    return gt;
}

// --- benchmark ---------------------------------------------------------------

struct CaseMetrics {
    PrfResult keyframe;
    double p_at_1 = 0.0, p_at_2 = 0.0, p_at_3 = 0.0;
    double trace_sim = 0.0;
    PhaseTimings timings;
    std::vector<std::string> warnings;
};

struct BenchmarkReport {
    std::map<std::string, CaseMetrics> cases;           // keyed by case dir name
    std::map<std::string, std::string> failed_cases;    // name -> error
    CaseMetrics aggregate;                              // means over succeeded cases
};

namespace detail {

// Lines up predicted keyframes with ground-truth interval ordinals: result
// slot i holds the mapping result of the first predicted keyframe inside
// interval i, or an empty result (guaranteed miss) when the interval was
// never hit.
inline std::vector<MappingResult> align_results_to_intervals(const IndexSequence& mapping,
                                                             const KeyframeGroundTruth& kf_gt) {
    std::vector<MappingResult> aligned(kf_gt.intervals.size());
    for (std::size_t i = 0; i < kf_gt.intervals.size(); ++i) {
        aligned[i].keyframe_index = -1;
        for (const auto& res : mapping.results) {
            if (res.keyframe_index >= kf_gt.intervals[i].first &&
                res.keyframe_index <= kf_gt.intervals[i].second) {
                aligned[i] = res;
                break;
            }
        }
    }
    return aligned;
}

}  // namespace detail

// Runs one dataset case (recording + utg.json + three ground-truth files,
// the layout synthgen emits) through the pipeline and scores every phase.
inline CaseMetrics run_case(const std::string& case_dir, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    const fs::path dir(case_dir);

    const auto kf_gt = load_keyframe_gt((dir / "gt_keyframes.json").string());
    const auto map_gt = load_mapping_gt((dir / "gt_mapping.json").string());
    const auto trace_gt = load_trace_gt((dir / "gt_traces.json").string());
    const Utg g = load_utg((dir / "utg.json").string());

    std::string recording_path;
    if (fs::exists(dir / "recording.gif"))
        recording_path = (dir / "recording.gif").string();
    else if (fs::is_directory(dir / "frames"))
        recording_path = (dir / "frames").string();
    else
        throw DecodeError("case has neither recording.gif nor frames/: " + case_dir);

    const PipelineResult run = run_pipeline_on_files(recording_path, g, cfg);

    CaseMetrics m;
    m.timings = run.timings;
    m.warnings = run.keyframes.warnings;
    m.keyframe = keyframe_prf(run.keyframes.indices(), kf_gt);

    const auto aligned = detail::align_results_to_intervals(run.mapping, kf_gt);
    m.p_at_1 = precision_at_k(aligned, map_gt, 1, &m.warnings);
    m.p_at_2 = precision_at_k(aligned, map_gt, 2, &m.warnings);
    m.p_at_3 = precision_at_k(aligned, map_gt, 3, &m.warnings);

    if (run.trace)
        m.trace_sim = trace_similarity(run.trace->path.nodes, trace_gt);
    else
        m.warnings.push_back("trace generation failed: " + run.trace_error);
    return m;
}

// Every subdirectory of dataset_dir holding a utg.json is a case. A case
// that throws is recorded as failed and the run continues; aggregates are
// plain means over the cases that succeeded.
inline BenchmarkReport run_benchmark(const std::string& dataset_dir, const RunConfig& cfg) {
    namespace fs = std::filesystem;
    BenchmarkReport report;

    std::vector<std::string> case_names;
    for (const auto& entry : fs::directory_iterator(dataset_dir))
        if (entry.is_directory() && fs::exists(entry.path() / "utg.json"))
            case_names.push_back(entry.path().filename().string());
    std::sort(case_names.begin(), case_names.end());

    for (const auto& name : case_names) {
        try {
            report.cases[name] = run_case((fs::path(dataset_dir) / name).string(), cfg);
        } catch (const std::exception& e) {
            report.failed_cases[name] = e.what();
        }
    }

    CaseMetrics& agg = report.aggregate;
    const double n = static_cast<double>(report.cases.size());
    if (n > 0) {
        for (const auto& [name, m] : report.cases) {
            agg.keyframe.precision += m.keyframe.precision;
            agg.keyframe.recall += m.keyframe.recall;
            agg.keyframe.f1 += m.keyframe.f1;
            agg.p_at_1 += m.p_at_1;
            agg.p_at_2 += m.p_at_2;
            agg.p_at_3 += m.p_at_3;
            agg.trace_sim += m.trace_sim;
            agg.timings.keyframe_location_sec += m.timings.keyframe_location_sec;
            agg.timings.gui_mapping_sec += m.timings.gui_mapping_sec;
            agg.timings.trace_generation_sec += m.timings.trace_generation_sec;
            agg.timings.recording_duration_sec += m.timings.recording_duration_sec;
        }
        agg.keyframe.precision /= n;
        agg.keyframe.recall /= n;
        agg.keyframe.f1 /= n;
        agg.p_at_1 /= n;
        agg.p_at_2 /= n;
        agg.p_at_3 /= n;
        agg.trace_sim /= n;
        agg.timings.keyframe_location_sec /= n;
        agg.timings.gui_mapping_sec /= n;
        agg.timings.trace_generation_sec /= n;
        agg.timings.recording_duration_sec /= n;
    }
    return report;
}

inline nlohmann::json case_metrics_to_json(const CaseMetrics& m) {
    return nlohmann::json{
        {"keyframe",
         {{"precision", m.keyframe.precision},
          {"recall", m.keyframe.recall},
          {"f1", m.keyframe.f1},
          {"tp", m.keyframe.tp},
          {"fp", m.keyframe.fp},
          {"fn", m.keyframe.fn}}},
        {"precision_at_1", m.p_at_1},
        {"precision_at_2", m.p_at_2},
        {"precision_at_3", m.p_at_3},
        {"trace_similarity", m.trace_sim},
        {"timings", timings_to_json(m.timings)},
        {"warnings", m.warnings}};
}

inline nlohmann::json report_to_json(const BenchmarkReport& report) {
    nlohmann::json j;
    j["cases"] = nlohmann::json::object();
    for (const auto& [name, m] : report.cases) j["cases"][name] = case_metrics_to_json(m);
    j["failed_cases"] = nlohmann::json::object();
    for (const auto& [name, err] : report.failed_cases) j["failed_cases"][name] = err;
    j["aggregate"] = case_metrics_to_json(report.aggregate);
    return j;
}

// Human-oriented table, one case per row plus the mean row, in the same
// column layout the timing report uses.
inline std::string report_to_table(const BenchmarkReport& report) {
    std::ostringstream os;
    os << std::left << std::setw(16) << "case" << std::right << std::setw(8) << "F1"
       << std::setw(8) << "P@1" << std::setw(8) << "P@2" << std::setw(8) << "P@3"
       << std::setw(8) << "TrSim" << std::setw(12) << "Keyfr(s)" << std::setw(12)
       << "Map(s)" << std::setw(12) << "Trace(s)" << std::setw(12) << "Total(s)" << "\n";
    os << std::fixed << std::setprecision(3);
    auto row = [&os](const std::string& name, const CaseMetrics& m) {
        os << std::left << std::setw(16) << name << std::right << std::setw(8) << m.keyframe.f1
           << std::setw(8) << m.p_at_1 << std::setw(8) << m.p_at_2 << std::setw(8) << m.p_at_3
           << std::setw(8) << m.trace_sim << std::setw(12) << m.timings.keyframe_location_sec
           << std::setw(12) << m.timings.gui_mapping_sec << std::setw(12)
           << m.timings.trace_generation_sec << std::setw(12) << m.timings.total_sec() << "\n";
    };
    for (const auto& [name, m] : report.cases) row(name, m);
    row("MEAN", report.aggregate);
    for (const auto& [name, err] : report.failed_cases)
        os << std::left << std::setw(16) << name << "FAILED: " << err << "\n";
    return os.str();
}

}  // namespace gifreplay
