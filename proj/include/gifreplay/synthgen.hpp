#pragma once

// Deterministic generator of synthetic dataset cases: a connected UTG with
// rendered screenshots, a scripted walk through it, a recording composed of
// steady runs and transition frames, and the three ground-truth files. The
// whole case is a pure function of SynthConfig, byte for byte.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gifreplay/error.hpp"
#include "gifreplay/gif.hpp"
#include "gifreplay/image.hpp"
#include "gifreplay/image_io.hpp"
#include "gifreplay/prng.hpp"

namespace gifreplay {

enum class TransitionKind { CrossFade, Slide, CutPartialRender };

inline const char* to_string(TransitionKind k) {
    switch (k) {
        case TransitionKind::CrossFade: return "cross-fade";
        case TransitionKind::Slide: return "slide";
        case TransitionKind::CutPartialRender: return "cut-with-partial-render";
    }
    return "?";
}

struct SynthConfig {
    std::uint64_t seed = 0;
    int n_nodes = 2;
    double edge_density = 0.02;  // probability per ordered node pair
    int width = 960;
    int height = 540;
    int steady_frames = 8;       // >= 6 keeps a full default steady run
    int transition_frames = 4;
    TransitionKind transition_kind = TransitionKind::Slide;
    int path_len = 1;            // edges walked from the launch node
    bool hard = false;           // one shared background across nodes
    bool emit_gif = true;        // false: frames/ directory + timing.json
    int delay_ms = 70;

    void validate() const {
        if (n_nodes < 2) throw ContractError("SynthConfig: n_nodes must be >= 2");
        if (steady_frames < 5) throw ContractError("SynthConfig: steady_frames must be >= 5");
        if (transition_frames < 0)
            throw ContractError("SynthConfig: transition_frames must be >= 0");
        if (path_len < 1 || path_len >= n_nodes)
            throw ContractError("SynthConfig: path_len must be in [1, n_nodes)");
        if (width < 64 || height < 64)
            throw ContractError("SynthConfig: resolution must be at least 64x64");
        if (edge_density < 0.0 || edge_density > 1.0)
            throw ContractError("SynthConfig: edge_density must be in [0, 1]");
    }
};

struct SynthCase {
    std::string dir;
    std::vector<std::string> node_ids;
    std::vector<std::string> walk;  // ground-truth trace (chain of node ids)
    int frame_count = 0;
    std::vector<std::pair<int, int>> keyframe_intervals;
};

namespace synthdetail {

struct Rgb {
    std::uint8_t r, g, b;
};

inline Rgb hsv(double h, double s, double v) {
    h = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0) / 60.0;
    const int i = static_cast<int>(h);
    const double f = h - i;
    const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
    double r, g, b;
    switch (i % 6) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
    return Rgb{static_cast<std::uint8_t>(std::lround(r * 255)),
               static_cast<std::uint8_t>(std::lround(g * 255)),
               static_cast<std::uint8_t>(std::lround(b * 255))};
}

inline void fill_rect(Image& img, int x0, int y0, int w, int h, Rgb c) {
    const int x1 = std::min(img.width, x0 + w);
    const int y1 = std::min(img.height, y0 + h);
    for (int y = std::max(0, y0); y < y1; ++y)
        for (int x = std::max(0, x0); x < x1; ++x) img.set(x, y, c.r, c.g, c.b);
}

// Seven-segment digit out of filled rectangles; gives the renderer crisp
// corners for the feature detector and a per-node identity block.
inline void draw_digit(Image& img, int digit, int x, int y, int w, int h, Rgb c) {
    const int t = std::max(3, w / 5);  // segment thickness
    static constexpr std::array<std::uint8_t, 10> kSegments = {
        0b0111111, 0b0000110, 0b1011011, 0b1001111, 0b1100110,
        0b1101101, 0b1111101, 0b0000111, 0b1111111, 0b1101111};
    const std::uint8_t seg = kSegments[static_cast<std::size_t>(digit % 10)];
    const int half = h / 2;
    if (seg & 0b0000001) fill_rect(img, x, y, w, t, c);                        // a: top
    if (seg & 0b0000010) fill_rect(img, x + w - t, y, t, half, c);             // b: top right
    if (seg & 0b0000100) fill_rect(img, x + w - t, y + half, t, h - half, c);  // c: bottom right
    if (seg & 0b0001000) fill_rect(img, x, y + h - t, w, t, c);                // d: bottom
    if (seg & 0b0010000) fill_rect(img, x, y + half, t, h - half, c);          // e: bottom left
    if (seg & 0b0100000) fill_rect(img, x, y, t, half, c);                     // f: top left
    if (seg & 0b1000000) fill_rect(img, x, y + half - t / 2, w, t, c);         // g: middle
}

struct NodeStyle {
    Rgb background;
    bool dark_background;
};

// Backgrounds alternate between a dark and a light value band so any two
// walk-adjacent screens differ strongly in mean luminance; hard mode pins
// one background for every node and leaves only structure to tell them
// apart.
inline NodeStyle node_style(const SynthConfig& cfg, int node_index, bool dark) {
    if (cfg.hard) return NodeStyle{Rgb{120, 120, 120}, false};
    const double hue = 360.0 * node_index / cfg.n_nodes + static_cast<double>(cfg.seed % 97);
    return NodeStyle{hsv(hue, 0.55, dark ? 0.30 : 0.88), dark};
}

// Full render of one screen: background, widget rectangles, separator
// lines, and a two-digit identity glyph. `completeness` in [0,1] draws only
// a prefix of the widgets (the partially rendered state).
inline Image render_screen(const SynthConfig& cfg, int node_index, bool dark,
                           double completeness = 1.0) {
    const NodeStyle style = node_style(cfg, node_index, dark);
    Image img(cfg.width, cfg.height);
    fill_rect(img, 0, 0, cfg.width, cfg.height, style.background);

    SplitMix64 rng(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(node_index) * 7919ULL + 1);
    const Rgb accent = style.dark_background ? Rgb{235, 235, 235} : Rgb{25, 25, 25};

    struct Widget {
        int x, y, w, h;
        Rgb color;
    };
    std::vector<Widget> widgets;

    // Header bar + separators give every screen page-like furniture.
    const double hue2 = 360.0 * node_index / cfg.n_nodes + 160.0 + static_cast<double>(cfg.seed % 53);
    widgets.push_back({0, 0, cfg.width, cfg.height / 10, hsv(hue2, 0.65, style.dark_background ? 0.75 : 0.45)});
    const int n_rects = rng.next_int(3, 8);
    for (int i = 0; i < n_rects; ++i) {
        Widget w;
        w.w = rng.next_int(cfg.width / 8, cfg.width / 3);
        w.h = rng.next_int(cfg.height / 10, cfg.height / 4);
        w.x = rng.next_int(0, cfg.width - w.w - 1);
        w.y = rng.next_int(cfg.height / 8, cfg.height - w.h - 1);
        const double hw = 360.0 * (node_index + i + 2.0) / cfg.n_nodes * 1.7;
        w.color = hsv(hw, 0.5, style.dark_background ? 0.70 : 0.35);
        widgets.push_back(w);
    }
    const int n_lines = rng.next_int(2, 3);
    for (int i = 0; i < n_lines; ++i) {
        const int y = rng.next_int(cfg.height / 6, cfg.height - 8);
        widgets.push_back({0, y, cfg.width, 3, accent});
    }

    const int shown = static_cast<int>(std::ceil(widgets.size() * std::clamp(completeness, 0.0, 1.0)));
    for (int i = 0; i < shown; ++i)
        fill_rect(img, widgets[i].x, widgets[i].y, widgets[i].w, widgets[i].h, widgets[i].color);

    if (completeness >= 1.0) {
        // Identity glyph: node index as two seven-segment digits.
        const int gw = std::max(24, cfg.width / 14);
        const int gh = std::max(40, cfg.height / 5);
        const int gx = cfg.width - 2 * gw - gw / 2 - 12;
        const int gy = cfg.height - gh - 16;
        fill_rect(img, gx - 8, gy - 8, 2 * gw + gw / 2 + 16, gh + 16, style.background);
        draw_digit(img, (node_index / 10) % 10, gx, gy, gw, gh, accent);
        draw_digit(img, node_index % 10, gx + gw + gw / 2, gy, gw, gh, accent);
    }
    return img;
}

inline Image blend(const Image& a, const Image& b, double alpha) {
    Image out(a.width, a.height);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        const double v = a.pixels[i] + (b.pixels[i] - a.pixels[i]) * alpha;
        out.pixels[i] = static_cast<std::uint8_t>(std::lround(v));
    }
    return out;
}

// Eased fade schedule: most of the blend happens entering and leaving the
// fade, with a slow stretch in the middle. Mirrors how rendered fades look
// in practice and keeps any high-similarity plateau short (at most
// transition_frames - 1 consecutive scores).
inline double fade_alpha(int j, int total) {
    const double u = 2.0 * j / (total + 1) - 1.0;
    return 0.5 + 0.5 * (0.6 * u * u * u + 0.4 * u);
}

// Push transition: the old screen slides out left while the new one slides
// in from the right.
inline Image slide(const Image& from, const Image& to, double progress) {
    const int offset = static_cast<int>(std::lround(from.width * progress));
    Image out(from.width, from.height);
    for (int y = 0; y < from.height; ++y) {
        for (int x = 0; x < from.width; ++x) {
            const int sx = x + offset;
            const std::uint8_t* p =
                sx < from.width ? from.at(sx, y) : to.at(sx - from.width, y);
            out.set(x, y, p[0], p[1], p[2]);
        }
    }
    return out;
}

inline std::string node_id(int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "S%02d", index);
    return buf;
}

}  // namespace synthdetail

// Writes a complete dataset case under out_dir:
//   utg.json, shots/<id>.png, recording.gif (or frames/ + timing.json),
//   gt_keyframes.json, gt_mapping.json, gt_traces.json
inline SynthCase generate_case(const SynthConfig& cfg, const std::string& out_dir) {
    namespace fs = std::filesystem;
    cfg.validate();

    SynthCase result;
    result.dir = out_dir;
    fs::create_directories(fs::path(out_dir) / "shots");

    SplitMix64 rng(cfg.seed);

    // Walk chain: launch plus path_len distinct nodes in shuffled order.
    std::vector<int> others;
    for (int i = 1; i < cfg.n_nodes; ++i) others.push_back(i);
    for (std::size_t i = others.size(); i > 1; --i)
        std::swap(others[i - 1], others[rng.next_below(i)]);
    std::vector<int> chain{0};
    for (int k = 0; k < cfg.path_len; ++k) chain.push_back(others[static_cast<std::size_t>(k)]);

    for (int i = 0; i < cfg.n_nodes; ++i) result.node_ids.push_back(synthdetail::node_id(i));
    for (int c : chain) result.walk.push_back(synthdetail::node_id(c));

    // Edges: the walk itself, a random attachment tree over the remaining
    // nodes (keeps everything reachable from launch), then density extras.
    std::vector<std::array<int, 2>> edge_list;
    std::set<std::array<int, 2>> edge_set;
    auto add_edge = [&](int u, int v) {
        if (u == v) return false;
        if (!edge_set.insert({u, v}).second) return false;
        edge_list.push_back({u, v});
        return true;
    };
    for (std::size_t k = 0; k + 1 < chain.size(); ++k) add_edge(chain[k], chain[k + 1]);

    std::vector<int> connected = chain;
    std::set<int> in_chain(chain.begin(), chain.end());
    for (int v = 1; v < cfg.n_nodes; ++v) {
        if (in_chain.count(v)) continue;
        const int parent = connected[static_cast<std::size_t>(rng.next_below(connected.size()))];
        add_edge(parent, v);
        connected.push_back(v);
    }
    for (int u = 0; u < cfg.n_nodes; ++u)
        for (int v = 0; v < cfg.n_nodes; ++v)
            if (u != v && rng.next_unit() < cfg.edge_density) add_edge(u, v);

    // Background class: alternating along the walk (so consecutive screens
    // in the recording always sit in opposite luminance bands), index
    // parity elsewhere.
    std::vector<bool> dark(static_cast<std::size_t>(cfg.n_nodes));
    for (int i = 0; i < cfg.n_nodes; ++i) dark[static_cast<std::size_t>(i)] = (i % 2) == 1;
    for (std::size_t k = 0; k < chain.size(); ++k)
        dark[static_cast<std::size_t>(chain[k])] = (k % 2) == 1;

    // Screens.
    std::vector<Image> screens;
    screens.reserve(cfg.n_nodes);
    for (int i = 0; i < cfg.n_nodes; ++i)
        screens.push_back(
            synthdetail::render_screen(cfg, i, dark[static_cast<std::size_t>(i)]));
    for (int i = 0; i < cfg.n_nodes; ++i)
        save_png(screens[i], (fs::path(out_dir) / "shots" / (result.node_ids[i] + ".png")).string());

    // Manifest.
    nlohmann::json utg;
    utg["launch"] = result.node_ids[0];
    utg["nodes"] = nlohmann::json::array();
    for (int i = 0; i < cfg.n_nodes; ++i)
        utg["nodes"].push_back({{"id", result.node_ids[i]},
                                {"screenshot", "shots/" + result.node_ids[i] + ".png"},
                                {"label", "screen " + std::to_string(i)}});
    utg["edges"] = nlohmann::json::array();
    for (std::size_t i = 0; i < edge_list.size(); ++i)
        utg["edges"].push_back({{"from", synthdetail::node_id(edge_list[i][0])},
                                {"to", synthdetail::node_id(edge_list[i][1])},
                                {"action", "tap:btn_" + std::to_string(i)}});
    {
        std::ofstream out(fs::path(out_dir) / "utg.json");
        out << utg.dump(2) << "\n";
    }

    // Recording: steady runs of each walked screen with transitions between.
    std::vector<Image> frames;
    std::vector<std::pair<int, int>> intervals;
    for (std::size_t k = 0; k < chain.size(); ++k) {
        const Image& full = screens[static_cast<std::size_t>(chain[k])];
        const int start = static_cast<int>(frames.size());
        for (int i = 0; i < cfg.steady_frames; ++i) frames.push_back(full);
        intervals.push_back({start, static_cast<int>(frames.size()) - 1});

        if (k + 1 == chain.size()) break;
        const Image& next = screens[static_cast<std::size_t>(chain[k + 1])];
        switch (cfg.transition_kind) {
            case TransitionKind::CrossFade:
                for (int j = 1; j <= cfg.transition_frames; ++j)
                    frames.push_back(synthdetail::blend(
                        full, next, synthdetail::fade_alpha(j, cfg.transition_frames)));
                break;
            case TransitionKind::Slide:
                for (int j = 1; j <= cfg.transition_frames; ++j)
                    frames.push_back(synthdetail::slide(
                        full, next, static_cast<double>(j) / (cfg.transition_frames + 1)));
                break;
            case TransitionKind::CutPartialRender: {
                const int plateau = std::clamp(cfg.transition_frames, 2, 4);
                const Image partial = synthdetail::render_screen(
                    cfg, chain[k + 1], dark[static_cast<std::size_t>(chain[k + 1])], 0.5);
                for (int j = 0; j < plateau; ++j) frames.push_back(partial);
                break;
            }
        }
    }
    result.frame_count = static_cast<int>(frames.size());
    result.keyframe_intervals = intervals;

    if (cfg.emit_gif) {
        std::vector<GifEncodeFrame> gif_frames;
        gif_frames.reserve(frames.size());
        for (auto& f : frames)
            gif_frames.push_back(GifEncodeFrame{std::move(f), cfg.delay_ms, 0, 0, 1});
        encode_gif((fs::path(out_dir) / "recording.gif").string(), cfg.width, cfg.height,
                   gif_frames);
    } else {
        fs::create_directories(fs::path(out_dir) / "frames");
        nlohmann::json timing;
        timing["delays_ms"] = nlohmann::json::array();
        for (std::size_t i = 0; i < frames.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "%05zu.png", i);
            save_png(frames[i], (fs::path(out_dir) / "frames" / name).string());
            timing["delays_ms"].push_back(cfg.delay_ms);
        }
        std::ofstream out(fs::path(out_dir) / "frames" / "timing.json");
        out << timing.dump() << "\n";
    }

    // Ground truths fall straight out of the construction.
    {
        nlohmann::json j;
        j["intervals"] = nlohmann::json::array();
        for (const auto& [s, e] : intervals) j["intervals"].push_back({s, e});
        std::ofstream out(fs::path(out_dir) / "gt_keyframes.json");
        out << j.dump() << "\n";
    }
    {
        nlohmann::json j;
        j["pairs"] = nlohmann::json::array();
        for (std::size_t k = 0; k < chain.size(); ++k)
            j["pairs"].push_back({static_cast<int>(k), result.walk[k]});
        std::ofstream out(fs::path(out_dir) / "gt_mapping.json");
        out << j.dump() << "\n";
    }
    {
        nlohmann::json j;
        j["traces"] = nlohmann::json::array();
        j["traces"].push_back(result.walk);
        std::ofstream out(fs::path(out_dir) / "gt_traces.json");
        out << j.dump() << "\n";
    }
    return result;
}

}  // namespace gifreplay
