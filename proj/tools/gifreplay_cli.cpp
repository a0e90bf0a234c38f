// gifreplay: turn a visual bug recording plus a UI transition graph into a
// replayable execution trace.
//
// Exit codes are a stable contract:
//   0 ok, 2 input/decode error, 3 no keyframes found, 4 target unreachable,
//   5 path enumeration explosion, 6 empty dataset.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gifreplay/evalkit.hpp"
#include "gifreplay/image_io.hpp"
#include "gifreplay/pipeline.hpp"
#include "gifreplay/synthgen.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNoKeyframes = 3;
constexpr int kExitUnreachable = 4;
constexpr int kExitExplosion = 5;
constexpr int kExitEmptyDataset = 6;

struct CliOptions {
    gifreplay::RunConfig run;
    std::string config_path;
};

// Shared tunable flags; any flag given on the command line wins over the
// config file, which wins over defaults.
void add_tunables(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file with tunables");
    cmd->add_option("--sim-threshold", opts.run.seg.sim_threshold,
                    "consecutive-frame similarity threshold");
    cmd->add_option("--steady-frames", opts.run.seg.steady_min_frames,
                    "minimum similar-score run for a steady state");
    cmd->add_option("--partial-render-max", opts.run.seg.partial_render_max_frames,
                    "longest plateau absorbed into a transition");
    cmd->add_option("--ssim-window", opts.run.ssim.window, "SSIM window side");
    cmd->add_option("--ssim-stride", opts.run.ssim.stride, "SSIM window stride");
    cmd->add_option("--w", opts.run.map.w, "weight of the local-feature score");
    cmd->add_option("--top-k", opts.run.map.top_k, "retrieval depth per keyframe");
    cmd->add_option("--min-score", opts.run.map.min_score, "drop keyframes mapping below this");
    cmd->add_option("--max-hamming", opts.run.map.max_hamming, "descriptor match cutoff");
    cmd->add_option("--fast-threshold", opts.run.feat.fast_threshold, "corner intensity delta");
    cmd->add_option("--max-keypoints", opts.run.feat.max_keypoints, "keypoint budget");
    cmd->add_option("--pyramid-levels", opts.run.feat.pyramid_levels, "pyramid levels");
    cmd->add_option("--max-paths", opts.run.limits.max_paths, "path enumeration cap");
    cmd->add_option("--max-depth", opts.run.limits.max_depth, "path depth cap");
    cmd->add_option("--threads", opts.run.threads, "worker threads")
        ->envname("GIFREPLAY_THREADS");
}

// Re-parse the config file first, then re-apply explicit flags on top.
void apply_config_file(const CLI::App* cmd, CliOptions& opts) {
    if (opts.config_path.empty()) return;
    gifreplay::RunConfig from_file = gifreplay::load_run_config(opts.config_path);
    const gifreplay::RunConfig defaults;
    const gifreplay::RunConfig flags = opts.run;

    opts.run = from_file;
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--sim-threshold")) opts.run.seg.sim_threshold = flags.seg.sim_threshold;
    if (given("--steady-frames")) opts.run.seg.steady_min_frames = flags.seg.steady_min_frames;
    if (given("--partial-render-max"))
        opts.run.seg.partial_render_max_frames = flags.seg.partial_render_max_frames;
    if (given("--ssim-window")) opts.run.ssim.window = flags.ssim.window;
    if (given("--ssim-stride")) opts.run.ssim.stride = flags.ssim.stride;
    if (given("--w")) opts.run.map.w = flags.map.w;
    if (given("--top-k")) opts.run.map.top_k = flags.map.top_k;
    if (given("--min-score")) opts.run.map.min_score = flags.map.min_score;
    if (given("--max-hamming")) opts.run.map.max_hamming = flags.map.max_hamming;
    if (given("--fast-threshold")) opts.run.feat.fast_threshold = flags.feat.fast_threshold;
    if (given("--max-keypoints")) opts.run.feat.max_keypoints = flags.feat.max_keypoints;
    if (given("--pyramid-levels")) opts.run.feat.pyramid_levels = flags.feat.pyramid_levels;
    if (given("--max-paths")) opts.run.limits.max_paths = flags.limits.max_paths;
    if (given("--max-depth")) opts.run.limits.max_depth = flags.limits.max_depth;
    if (given("--threads") || std::getenv("GIFREPLAY_THREADS"))
        opts.run.threads = flags.threads;
    (void)defaults;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_keyframes(const std::string& input, const std::string& out_file,
                  const std::string& dump_dir, const CliOptions& opts) {
    const gifreplay::Recording rec = gifreplay::load_recording(input, opts.run.resize_to);
    const auto kfs =
        gifreplay::extract_keyframes(rec, opts.run.ssim, opts.run.seg, opts.run.threads);
    print_warnings(kfs.warnings);

    gifreplay::write_json_file(gifreplay::keyframes_to_json(kfs, rec), out_file);
    if (!dump_dir.empty()) {
        std::filesystem::create_directories(dump_dir);
        for (const auto& f : kfs.keyframes) {
            char name[32];
            std::snprintf(name, sizeof name, "kf_%05d.png", f.index);
            gifreplay::save_png(f.raster, (std::filesystem::path(dump_dir) / name).string());
        }
    }
    std::cout << "keyframes: " << kfs.keyframes.size() << " -> " << out_file << "\n";
    return kfs.keyframes.empty() ? kExitNoKeyframes : kExitOk;
}

int cmd_map(const std::string& keyframes_file, const std::string& frames_src,
            const std::string& utg_file, const std::string& out_file, const CliOptions& opts) {
    std::ifstream in(keyframes_file);
    if (!in) throw gifreplay::DecodeError("cannot open keyframes file: " + keyframes_file);
    nlohmann::json kj;
    in >> kj;

    const gifreplay::Recording rec = gifreplay::load_recording(frames_src, opts.run.resize_to);
    gifreplay::KeyframeSequence kfs;
    kfs.source = kj.value("source", frames_src);
    for (const auto& item : kj.at("keyframes")) {
        const int idx = item.at("index").get<int>();
        if (idx < 0 || idx >= static_cast<int>(rec.frames.size()))
            throw gifreplay::DecodeError("keyframe index " + std::to_string(idx) +
                                         " out of range for " + frames_src);
        kfs.keyframes.push_back(rec.frames[static_cast<std::size_t>(idx)]);
    }

    const gifreplay::Utg g = gifreplay::load_utg(utg_file);
    const auto mapping = gifreplay::map_keyframes(kfs, g, opts.run.map, opts.run.ssim,
                                                  opts.run.feat, opts.run.threads);
    print_warnings(mapping.warnings);

    nlohmann::json j = gifreplay::mapping_to_json(mapping);
    j["params"] = {{"w", opts.run.map.w},
                   {"top_k", opts.run.map.top_k},
                   {"sampler_seed", opts.run.feat.sampler_seed}};
    gifreplay::write_json_file(j, out_file);
    std::cout << "mapped " << mapping.indices.size() << " keyframes -> " << out_file << "\n";
    return kExitOk;
}

int cmd_trace(const std::string& mapping_file, const std::string& utg_file,
              const std::string& out_file, const CliOptions& opts) {
    std::ifstream in(mapping_file);
    if (!in) throw gifreplay::DecodeError("cannot open mapping file: " + mapping_file);
    nlohmann::json mj;
    in >> mj;
    const auto indices = mj.at("indices").get<std::vector<std::string>>();

    const gifreplay::Utg g = gifreplay::load_utg(utg_file);
    const auto trace = gifreplay::generate_trace(indices, g, opts.run.limits);
    gifreplay::write_json_file(gifreplay::trace_to_json(trace), out_file);
    std::cout << "trace of " << trace.path.nodes.size() << " nodes -> " << out_file << "\n";
    return kExitOk;
}

int cmd_run(const std::string& input, const std::string& utg_file, const std::string& out_dir,
            const CliOptions& opts) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    const gifreplay::Utg g = gifreplay::load_utg(utg_file);

    gifreplay::detail::PhaseClock clock;
    const gifreplay::Recording rec = gifreplay::load_recording(input, opts.run.resize_to);
    const double decode_sec = clock.lap();
    gifreplay::PipelineResult result = gifreplay::run_pipeline(rec, g, opts.run);
    result.timings.keyframe_location_sec += decode_sec;

    print_warnings(result.keyframes.warnings);
    print_warnings(result.mapping.warnings);

    gifreplay::write_json_file(gifreplay::keyframes_to_json(result.keyframes, rec),
                               (fs::path(out_dir) / "keyframes.json").string());
    nlohmann::json mj = gifreplay::mapping_to_json(result.mapping);
    mj["params"] = {{"w", opts.run.map.w},
                    {"top_k", opts.run.map.top_k},
                    {"sampler_seed", opts.run.feat.sampler_seed}};
    gifreplay::write_json_file(mj, (fs::path(out_dir) / "mapping.json").string());
    gifreplay::write_json_file(gifreplay::timings_to_json(result.timings),
                               (fs::path(out_dir) / "timings.json").string());

    if (result.keyframes.keyframes.empty()) {
        std::cerr << "no keyframes located; stopping after phase one\n";
        return kExitNoKeyframes;
    }
    if (!result.trace) {
        std::cerr << "trace generation failed: " << result.trace_error << "\n";
        return kExitUnreachable;
    }
    gifreplay::write_json_file(gifreplay::trace_to_json(*result.trace),
                               (fs::path(out_dir) / "trace.json").string());
    std::cout << "trace:";
    for (const auto& n : result.trace->path.nodes) std::cout << " " << n;
    std::cout << "\n  artifacts in " << out_dir << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& dataset_dir, const std::string& out_file,
             const CliOptions& opts) {
    const auto report = gifreplay::run_benchmark(dataset_dir, opts.run);
    if (report.cases.empty() && report.failed_cases.empty()) {
        std::cerr << "no dataset cases under " << dataset_dir << "\n";
        return kExitEmptyDataset;
    }
    gifreplay::write_json_file(gifreplay::report_to_json(report), out_file);
    std::cout << gifreplay::report_to_table(report);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"replayable execution traces from visual bug recordings"};
    app.require_subcommand(1);

    CliOptions opts;
    opts.run.threads = gifreplay::default_thread_count();
    std::string input, out_path, utg_file, keyframes_file, mapping_file, frames_src, dump_dir;
    std::string dataset_dir;

    auto* keyframes = app.add_subcommand("keyframes", "locate fully rendered keyframes");
    keyframes->add_option("--input", input, "GIF file or frame directory")->required();
    keyframes->add_option("--out", out_path, "keyframe JSON output")->required();
    keyframes->add_option("--dump-frames", dump_dir, "also write keyframe PNGs here");
    add_tunables(keyframes, opts);

    auto* map = app.add_subcommand("map", "map keyframes onto UTG screenshots");
    map->add_option("--keyframes", keyframes_file, "keyframe JSON from `keyframes`")->required();
    map->add_option("--frames-dir", frames_src, "the recording (GIF or frame directory)")
        ->required();
    map->add_option("--utg", utg_file, "UTG manifest JSON")->required();
    map->add_option("--out", out_path, "mapping JSON output")->required();
    add_tunables(map, opts);

    auto* trace = app.add_subcommand("trace", "generate the execution trace");
    trace->add_option("--mapping", mapping_file, "mapping JSON from `map`")->required();
    trace->add_option("--utg", utg_file, "UTG manifest JSON")->required();
    trace->add_option("--out", out_path, "trace JSON output")->required();
    add_tunables(trace, opts);

    auto* run = app.add_subcommand("run", "all three phases end to end");
    run->add_option("--input", input, "GIF file or frame directory")->required();
    run->add_option("--utg", utg_file, "UTG manifest JSON")->required();
    run->add_option("--out", out_path, "artifact output directory")->required();
    add_tunables(run, opts);

    auto* eval = app.add_subcommand("eval", "benchmark a dataset directory");
    eval->add_option("--dataset", dataset_dir, "directory of dataset cases")->required();
    eval->add_option("--out", out_path, "report JSON output")->required();
    add_tunables(eval, opts);

    gifreplay::SynthConfig synth_cfg;
    int synth_cases = 1;
    std::string synth_kind = "slide";
    bool synth_frames_dir = false;
    auto* synth = app.add_subcommand("synth", "generate synthetic dataset cases");
    synth->add_option("--out", out_path, "dataset output directory")->required();
    synth->add_option("--cases", synth_cases, "number of cases");
    synth->add_option("--seed", synth_cfg.seed, "base seed (case i uses seed+i)");
    synth->add_option("--nodes", synth_cfg.n_nodes, "UTG size");
    synth->add_option("--density", synth_cfg.edge_density, "extra-edge probability");
    synth->add_option("--width", synth_cfg.width, "screen width");
    synth->add_option("--height", synth_cfg.height, "screen height");
    synth->add_option("--steady", synth_cfg.steady_frames, "frames per steady screen");
    synth->add_option("--transition", synth_cfg.transition_frames, "frames per transition");
    synth->add_option("--path-len", synth_cfg.path_len, "edges walked from launch");
    synth->add_option("--kind", synth_kind, "transition kind: fade|slide|cut");
    synth->add_option("--delay", synth_cfg.delay_ms, "per-frame delay in ms");
    synth->add_flag("--hard", synth_cfg.hard, "share one background across nodes");
    synth->add_flag("--frames-dir", synth_frames_dir, "emit frames/ + timing.json, not a GIF");

    CLI11_PARSE(app, argc, argv);

    try {
        if (keyframes->parsed()) {
            apply_config_file(keyframes, opts);
            return cmd_keyframes(input, out_path, dump_dir, opts);
        }
        if (map->parsed()) {
            apply_config_file(map, opts);
            return cmd_map(keyframes_file, frames_src, utg_file, out_path, opts);
        }
        if (trace->parsed()) {
            apply_config_file(trace, opts);
            return cmd_trace(mapping_file, utg_file, out_path, opts);
        }
        if (run->parsed()) {
            apply_config_file(run, opts);
            return cmd_run(input, utg_file, out_path, opts);
        }
        if (eval->parsed()) {
            apply_config_file(eval, opts);
            return cmd_eval(dataset_dir, out_path, opts);
        }
        if (synth->parsed()) {
            if (synth_kind == "fade")
                synth_cfg.transition_kind = gifreplay::TransitionKind::CrossFade;
            else if (synth_kind == "slide")
                synth_cfg.transition_kind = gifreplay::TransitionKind::Slide;
            else if (synth_kind == "cut")
                synth_cfg.transition_kind = gifreplay::TransitionKind::CutPartialRender;
            else
                throw gifreplay::ContractError("unknown transition kind: " + synth_kind);
            synth_cfg.emit_gif = !synth_frames_dir;

            const std::uint64_t base_seed = synth_cfg.seed;
            for (int i = 0; i < synth_cases; ++i) {
                gifreplay::SynthConfig cfg = synth_cfg;
                cfg.seed = base_seed + static_cast<std::uint64_t>(i);
                char name[32];
                std::snprintf(name, sizeof name, "case_%03d", i);
                const auto c = gifreplay::generate_case(
                    cfg, (std::filesystem::path(out_path) / name).string());
                std::cout << name << ": " << c.frame_count << " frames, "
                          << c.node_ids.size() << " nodes, walk";
                for (const auto& n : c.walk) std::cout << " " << n;
                std::cout << "\n";
            }
            return kExitOk;
        }
    } catch (const gifreplay::ExplosionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitExplosion;
    } catch (const gifreplay::UnreachableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUnreachable;
    } catch (const gifreplay::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const gifreplay::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: invalid JSON input: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
