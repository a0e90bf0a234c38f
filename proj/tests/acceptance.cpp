// Acceptance suite: one test case per criterion, each printing a PASS line
// with its measured values. Thresholds are pinned here, not configurable.

#include <catch2/catch.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "gifreplay/evalkit.hpp"
#include "gifreplay/image_io.hpp"
#include "gifreplay/pipeline.hpp"
#include "gifreplay/prng.hpp"
#include "gifreplay/synthgen.hpp"
#include "test_util.hpp"

using namespace gifreplay;

namespace {

using Seq = std::vector<std::string>;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void pass(const std::string& line) { std::cout << "[PASS] " << line << std::endl; }

// Figure-example graph written as a real manifest with screenshots.
std::string write_nine_node_manifest(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "shots");
    nlohmann::json j;
    j["launch"] = "A";
    j["nodes"] = nlohmann::json::array();
    const Seq ids = {"A", "B", "C", "D", "E", "F", "G", "H", "I"};
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const std::string shot = "shots/" + ids[i] + ".png";
        save_png(testutil::solid(8, 8, static_cast<std::uint8_t>(i * 25), 100, 50),
                 (dir / shot).string());
        j["nodes"].push_back({{"id", ids[i]}, {"screenshot", shot}});
    }
    j["edges"] = nlohmann::json::array();
    const std::vector<std::pair<std::string, std::string>> edges = {
        {"A", "B"}, {"B", "C"}, {"C", "D"}, {"D", "E"}, {"E", "F"},
        {"E", "D"}, {"C", "H"}, {"H", "I"}, {"I", "F"}, {"I", "E"}};
    for (const auto& [u, v] : edges)
        j["edges"].push_back({{"from", u}, {"to", v}, {"action", "tap:" + u + v}});
    const std::string path = (dir / "utg.json").string();
    std::ofstream out(path);
    out << j.dump(2);
    return path;
}

// The 20 acceptance cases: seeds 0-19, 20-50 nodes, walks of 3-7 steps,
// 960x540, transition kinds cycling through all three.
SynthConfig acceptance_case_config(int i) {
    SynthConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(i);
    cfg.n_nodes = 20 + (i % 4) * 10;  // 20, 30, 40, 50
    cfg.path_len = 3 + (i % 5);       // 3..7
    cfg.width = 960;
    cfg.height = 540;
    cfg.steady_frames = 8;
    cfg.transition_frames = 4;
    cfg.edge_density = 1.0 / cfg.n_nodes;
    switch (i % 3) {
        case 0: cfg.transition_kind = TransitionKind::Slide; break;
        case 1: cfg.transition_kind = TransitionKind::CutPartialRender; break;
        default: cfg.transition_kind = TransitionKind::CrossFade; break;
    }
    return cfg;
}

struct AcceptanceDataset {
    testutil::TempDir tmp{"acceptance_ds"};
    double generation_sec = 0.0;

    AcceptanceDataset() {
        const auto t0 = std::chrono::steady_clock::now();
        for (int i = 0; i < 20; ++i) {
            char name[16];
            std::snprintf(name, sizeof name, "case_%02d", i);
            generate_case(acceptance_case_config(i), (tmp.path() / name).string());
        }
        generation_sec = seconds_since(t0);
    }
};

const AcceptanceDataset& dataset() {
    static AcceptanceDataset ds;
    return ds;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GIFREPLAY_CLI_PATH) + " " + args;
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

int lcs_brute(const Seq& a, const Seq& b) {
    const Seq& small = a.size() <= b.size() ? a : b;
    const Seq& big = a.size() <= b.size() ? b : a;
    int best = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << small.size()); ++mask) {
        Seq sub;
        for (std::size_t i = 0; i < small.size(); ++i)
            if (mask & (std::size_t{1} << i)) sub.push_back(small[i]);
        if (static_cast<int>(sub.size()) <= best) continue;
        std::size_t j = 0;
        for (const auto& item : big)
            if (j < sub.size() && item == sub[j]) ++j;
        if (j == sub.size()) best = static_cast<int>(sub.size());
    }
    return best;
}

std::set<Seq> brute_force_paths(const Utg& g, const std::string& start,
                                const std::string& target) {
    std::vector<std::string> ids;
    for (const auto& [id, n] : g.nodes) ids.push_back(id);
    std::set<std::pair<std::string, std::string>> edge_set;
    for (const auto& e : g.edges) edge_set.insert({e.from, e.to});
    std::set<Seq> found;
    Seq cur;
    std::vector<bool> used(ids.size(), false);
    auto rec = [&](auto&& self) -> void {
        if (!cur.empty() && cur.front() == start && cur.back() == target) {
            bool ok = true;
            for (std::size_t i = 0; i + 1 < cur.size(); ++i)
                if (!edge_set.count({cur[i], cur[i + 1]})) ok = false;
            if (ok) found.insert(cur);
        }
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (used[i]) continue;
            if (cur.empty() && ids[i] != start) continue;
            used[i] = true;
            cur.push_back(ids[i]);
            self(self);
            cur.pop_back();
            used[i] = false;
        }
    };
    rec(rec);
    return found;
}

}  // namespace

TEST_CASE("criterion 1: figure-example golden trace") {
    const auto t0 = std::chrono::steady_clock::now();
    testutil::TempDir tmp("acc_c1");
    const Utg g = load_utg(write_nine_node_manifest(tmp.path()));
    REQUIRE(g.nodes.size() == 9);

    const auto paths = enumerate_acyclic_paths(g, "A", "F");
    REQUIRE(paths.size() == 3);
    const std::vector<std::pair<Seq, int>> expected = {
        {{"A", "B", "C", "D", "E", "F"}, 3},
        {{"A", "B", "C", "H", "I", "F"}, 2},
        {{"A", "B", "C", "H", "I", "E", "F"}, 3}};
    const Seq x = {"C", "E", "F"};
    std::set<Seq> seen;
    for (const auto& p : paths) seen.insert(p.nodes);
    for (const auto& [nodes, expected_lcs] : expected) {
        REQUIRE(seen.count(nodes) == 1);
        REQUIRE(lcs(x, nodes).length == expected_lcs);
    }

    const ExecutionTrace t = generate_trace(x, g);
    REQUIRE(t.path.nodes == Seq{"A", "B", "C", "D", "E", "F"});

    const double elapsed = seconds_since(t0);
    REQUIRE(elapsed < 1.0);
    std::ostringstream os;
    os << "criterion 1: three candidates, LCS 3/2/3, trace {A,B,C,D,E,F} in " << elapsed << " s";
    pass(os.str());
}

TEST_CASE("criterion 2: LCS equals the exhaustive oracle on 200 random pairs") {
    SplitMix64 rng(0xACCE5501ULL);
    const char alphabet[] = {'a', 'b', 'c', 'd', 'e'};
    int checked = 0;
    for (int iter = 0; iter < 200; ++iter) {
        Seq x, y;
        const int nx = static_cast<int>(rng.next_below(11));
        const int ny = static_cast<int>(rng.next_below(11));
        for (int i = 0; i < nx; ++i) x.push_back(std::string(1, alphabet[rng.next_below(5)]));
        for (int i = 0; i < ny; ++i) y.push_back(std::string(1, alphabet[rng.next_below(5)]));
        REQUIRE(lcs(x, y).length == lcs_brute(x, y));
        ++checked;
    }
    pass("criterion 2: LCS oracle agreement on " + std::to_string(checked) + "/200 pairs");
}

TEST_CASE("criterion 3: path enumeration equals the permutation-filter oracle") {
    SplitMix64 rng(0xACCE5502ULL);
    int checked = 0;
    for (int iter = 0; iter < 100; ++iter) {
        const int n = 3 + static_cast<int>(rng.next_below(5));  // up to 7 nodes
        Utg g;
        for (int i = 0; i < n; ++i) {
            UtgNode node;
            node.id = std::string(1, static_cast<char>('a' + i));
            node.screenshot = LuminanceMask(2, 2, 0);
            g.nodes.emplace(node.id, std::move(node));
        }
        g.launch = "a";
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (u != v && rng.next_unit() < 0.3)
                    g.edges.push_back(UtgEdge{std::string(1, static_cast<char>('a' + u)),
                                              std::string(1, static_cast<char>('a' + v)), ""});
        g.rebuild_adjacency();
        const std::string target(1, static_cast<char>('a' + n - 1));
        std::set<Seq> got;
        for (const auto& p : enumerate_acyclic_paths(g, "a", target)) got.insert(p.nodes);
        REQUIRE(got == brute_force_paths(g, "a", target));
        ++checked;
    }
    pass("criterion 3: enumeration oracle agreement on " + std::to_string(checked) +
         "/100 digraphs");
}

TEST_CASE("criterion 4: SSIM identity, symmetry, and closed-form oracle") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const LuminanceMask m = testutil::random_mask(64, 64, seed + 900);
        REQUIRE(ssim(m, m).value == 1.0);
    }
    double max_asym = 0.0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const LuminanceMask a = testutil::random_mask(64, 64, seed * 2 + 1000);
        const LuminanceMask b = testutil::random_mask(64, 64, seed * 2 + 1001);
        max_asym = std::max(max_asym, std::abs(ssim(a, b).value - ssim(b, a).value));
    }
    REQUIRE(max_asym <= 1e-12);

    const SsimParams defaults;
    double max_err = 0.0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const LuminanceMask a = testutil::random_mask(8, 8, seed * 2 + 1100);
        const LuminanceMask b = testutil::random_mask(8, 8, seed * 2 + 1101);
        SsimParams p;
        p.window = 8;
        const double windowed = ssim(a, b, p).value;

        // Straight scalar evaluation of the closed form.
        const double n = 64.0;
        double mu_a = 0, mu_b = 0;
        for (std::size_t i = 0; i < 64; ++i) {
            mu_a += a.pixels[i];
            mu_b += b.pixels[i];
        }
        mu_a /= n;
        mu_b /= n;
        double var_a = 0, var_b = 0, cov = 0;
        for (std::size_t i = 0; i < 64; ++i) {
            var_a += (a.pixels[i] - mu_a) * (a.pixels[i] - mu_a);
            var_b += (b.pixels[i] - mu_b) * (b.pixels[i] - mu_b);
            cov += (a.pixels[i] - mu_a) * (b.pixels[i] - mu_b);
        }
        var_a /= n;
        var_b /= n;
        cov /= n;
        const double scalar = ((2 * mu_a * mu_b + defaults.c1()) * (2 * cov + defaults.c2())) /
                              ((mu_a * mu_a + mu_b * mu_b + defaults.c1()) *
                               (var_a + var_b + defaults.c2()));
        max_err = std::max(max_err, std::abs(windowed - std::clamp(scalar, 0.0, 1.0)));
    }
    REQUIRE(max_err <= 1e-9);

    std::ostringstream os;
    os << "criterion 4: identity exact, max asymmetry " << max_asym << ", oracle error "
       << max_err;
    pass(os.str());
}

TEST_CASE("criterion 5: synthetic end-to-end quality") {
    const auto t0 = std::chrono::steady_clock::now();
    const AcceptanceDataset& ds = dataset();

    RunConfig cfg;
    cfg.threads = default_thread_count();
    const BenchmarkReport report = run_benchmark(ds.tmp.str(), cfg);
    REQUIRE(report.failed_cases.empty());
    REQUIRE(report.cases.size() == 20);

    const double f1 = report.aggregate.keyframe.f1;
    const double p1 = report.aggregate.p_at_1;
    const double sim = report.aggregate.trace_sim;
    const double elapsed = seconds_since(t0);

    REQUIRE(f1 >= 0.95);
    REQUIRE(p1 >= 0.90);
    REQUIRE(sim >= 0.90);
    REQUIRE(elapsed < 300.0);

    std::ostringstream os;
    os << "criterion 5: F1 " << f1 << ", P@1 " << p1 << ", trace similarity " << sim << " over "
       << report.cases.size() << " cases in " << elapsed << " s (generation "
       << ds.generation_sec << " s)";
    pass(os.str());
}

TEST_CASE("criterion 6: robustness at 0.75x resolution") {
    const AcceptanceDataset& ds = dataset();

    RunConfig cfg;
    cfg.threads = default_thread_count();
    cfg.resize_to = std::make_pair(720, 405);
    const BenchmarkReport report = run_benchmark(ds.tmp.str(), cfg);
    REQUIRE(report.failed_cases.empty());
    REQUIRE(report.cases.size() == 20);

    const double p1 = report.aggregate.p_at_1;
    const double sim = report.aggregate.trace_sim;
    REQUIRE(p1 >= 0.85);
    REQUIRE(sim >= 0.85);

    std::ostringstream os;
    os << "criterion 6: downscaled P@1 " << p1 << ", trace similarity " << sim;
    pass(os.str());
}

TEST_CASE("criterion 7: metric hand traces") {
    KeyframeGroundTruth gt;
    gt.intervals = {{0, 4}, {10, 14}};
    const PrfResult r = keyframe_prf({2, 3, 20}, gt);
    REQUIRE(r.precision == Approx(1.0 / 3.0).margin(1e-15));
    REQUIRE(r.recall == Approx(0.5).margin(1e-15));
    REQUIRE(r.f1 == Approx(0.4).margin(1e-15));

    const double sim = sequence_similarity({"A", "B", "C", "D", "E", "F"},
                                           {"A", "B", "C", "H", "I", "F"});
    REQUIRE(sim == Approx(2.0 * 4.0 / 12.0).margin(1e-15));

    pass("criterion 7: keyframe PRF (1/3, 1/2, 0.4) and trace similarity 0.667 reproduce");
}

TEST_CASE("criterion 8: artifact determinism across thread counts") {
    testutil::TempDir tmp("acc_c8");
    SynthConfig cfg;
    cfg.seed = 42;
    cfg.n_nodes = 8;
    cfg.path_len = 3;
    cfg.width = 480;
    cfg.height = 270;
    cfg.steady_frames = 7;
    cfg.transition_frames = 3;
    generate_case(cfg, (tmp.path() / "case").string());

    const std::string case_dir = (tmp.path() / "case").string();
    const std::string out1 = (tmp.path() / "out_t1").string();
    const std::string out8 = (tmp.path() / "out_t8").string();
    REQUIRE(run_cli("run --input " + case_dir + "/recording.gif --utg " + case_dir +
                    "/utg.json --out " + out1 + " --threads 1 > /dev/null") == 0);
    REQUIRE(run_cli("run --input " + case_dir + "/recording.gif --utg " + case_dir +
                    "/utg.json --out " + out8 + " --threads 8 > /dev/null") == 0);

    // timings.json is wall-clock measurement and legitimately differs; the
    // computed artifacts must match byte for byte.
    for (const char* rel : {"keyframes.json", "mapping.json", "trace.json"}) {
        INFO(rel);
        REQUIRE(slurp(std::filesystem::path(out1) / rel) ==
                slurp(std::filesystem::path(out8) / rel));
    }
    pass("criterion 8: keyframes/mapping/trace artifacts byte-identical for --threads 1 vs 8");
}

TEST_CASE("criterion 9: desk-scale runtime budget") {
    testutil::TempDir tmp("acc_c9");
    SynthConfig cfg;
    cfg.seed = 999;
    cfg.n_nodes = 50;
    cfg.path_len = 6;
    cfg.width = 960;
    cfg.height = 540;
    cfg.steady_frames = 18;
    cfg.transition_frames = 4;
    cfg.edge_density = 1.0 / cfg.n_nodes;
    cfg.transition_kind = TransitionKind::Slide;
    const SynthCase c = generate_case(cfg, (tmp.path() / "case").string());
    REQUIRE(c.frame_count == 150);  // 7 steadies of 18 plus 6 transitions of 4

    const std::string case_dir = (tmp.path() / "case").string();
    const auto t0 = std::chrono::steady_clock::now();
    REQUIRE(run_cli("run --input " + case_dir + "/recording.gif --utg " + case_dir +
                    "/utg.json --out " + (tmp.path() / "out").string() +
                    " --threads 1 > /dev/null") == 0);
    const double elapsed = seconds_since(t0);
    REQUIRE(elapsed < 60.0);

    std::ostringstream os;
    os << "criterion 9: 150-frame 960x540 recording vs 50-node UTG in " << elapsed
       << " s single-threaded";
    pass(os.str());
}
