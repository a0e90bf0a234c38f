#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gifreplay/error.hpp"
#include "gifreplay/gif.hpp"
#include "gifreplay/image.hpp"
#include "gifreplay/image_io.hpp"

namespace gifreplay {

struct Frame {
    int index = 0;
    Image raster;
    int delay_ms = 0;
};

struct Recording {
    std::vector<Frame> frames;
    std::string source_path;
    double fps_nominal = 0.0;

    int width() const { return frames.empty() ? 0 : frames.front().raster.width; }
    int height() const { return frames.empty() ? 0 : frames.front().raster.height; }

    // Start time of frame `index`: sum of the delays before it.
    int time_ms_of(int index) const {
        int t = 0;
        for (int i = 0; i < index && i < static_cast<int>(frames.size()); ++i)
            t += frames[i].delay_ms;
        return t;
    }

    double duration_seconds() const {
        double total = 0;
        for (const auto& f : frames) total += f.delay_ms;
        return total / 1000.0;
    }
};

namespace detail {

inline double median_delay_ms(const std::vector<Frame>& frames) {
    std::vector<int> delays;
    delays.reserve(frames.size());
    for (const auto& f : frames) delays.push_back(f.delay_ms);
    std::sort(delays.begin(), delays.end());
    const std::size_t n = delays.size();
    if (n == 0) return 0.0;
    if (n % 2 == 1) return delays[n / 2];
    return (delays[n / 2 - 1] + delays[n / 2]) / 2.0;
}

inline void finalize_recording(Recording& rec,
                               const std::optional<std::pair<int, int>>& resize_to) {
    if (rec.frames.empty()) throw EmptyInputError("no frames in " + rec.source_path);

    int target_w = rec.frames.front().raster.width;
    int target_h = rec.frames.front().raster.height;
    if (resize_to) {
        target_w = resize_to->first;
        target_h = resize_to->second;
        if (target_w < 1 || target_h < 1)
            throw ContractError("load_recording: resize target must be >= 1x1");
    }
    for (auto& f : rec.frames) {
        if (f.raster.width != target_w || f.raster.height != target_h)
            f.raster = resize_bilinear(f.raster, target_w, target_h);
    }
    for (std::size_t i = 0; i < rec.frames.size(); ++i)
        rec.frames[i].index = static_cast<int>(i);

    const double med = median_delay_ms(rec.frames);
    rec.fps_nominal = med > 0 ? 1000.0 / med : 0.0;
}

inline bool has_frame_extension(const std::filesystem::path& p) {
    std::string ext = p.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

}  // namespace detail

// Accepts an animated GIF file or a directory of PNG/JPEG frames ordered by
// filename. A directory may carry timing.json = {"delays_ms": [...]} giving
// per-frame display durations; 100 ms per frame is assumed otherwise.
// Frames that do not match the first frame's dimensions (or resize_to, when
// given) are resampled so one Recording always has uniform rasters.
inline Recording load_recording(const std::string& path,
                                std::optional<std::pair<int, int>> resize_to = std::nullopt) {
    namespace fs = std::filesystem;
    Recording rec;
    rec.source_path = path;

    if (fs::is_directory(path)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(path))
            if (entry.is_regular_file() && detail::has_frame_extension(entry.path()))
                files.push_back(entry.path());
        std::sort(files.begin(), files.end(),
                  [](const fs::path& a, const fs::path& b) {
                      return a.filename().string() < b.filename().string();
                  });
        if (files.empty())
            throw EmptyInputError("no image frames in directory: " + path);

        std::vector<int> delays;
        const fs::path timing = fs::path(path) / "timing.json";
        if (fs::exists(timing)) {
            std::ifstream in(timing);
            nlohmann::json j;
            try {
                in >> j;
                delays = j.at("delays_ms").get<std::vector<int>>();
            } catch (const nlohmann::json::exception& e) {
                throw DecodeError("bad timing.json in " + path + ": " + e.what());
            }
        }

        for (std::size_t i = 0; i < files.size(); ++i) {
            Frame f;
            f.raster = load_image(files[i].string());
            f.delay_ms = i < delays.size() ? std::max(0, delays[i]) : 100;
            rec.frames.push_back(std::move(f));
        }
    } else if (fs::exists(path)) {
        GifAnimation anim = decode_gif(path);
        for (auto& gf : anim.frames)
            rec.frames.push_back(Frame{0, std::move(gf.raster), gf.delay_ms});
    } else {
        throw DecodeError("no such file or directory: " + path);
    }

    detail::finalize_recording(rec, resize_to);
    return rec;
}

}  // namespace gifreplay
