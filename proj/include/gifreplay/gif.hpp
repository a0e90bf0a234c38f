#pragma once

// GIF87a/89a codec. The decoder resolves frame disposal and compositing so
// every decoded frame is a full raster; the encoder writes exact-palette
// frames (synthetic screens stay well under 256 colors) and exists mainly
// so tests and the synthetic generator can produce real recordings.

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "gifreplay/error.hpp"
#include "gifreplay/image.hpp"

namespace gifreplay {

struct GifFrame {
    Image raster;      // full canvas after compositing
    int delay_ms = 0;  // from the preceding graphic control extension
};

struct GifAnimation {
    int width = 0;
    int height = 0;
    std::vector<GifFrame> frames;
};

namespace gifdetail {

class ByteReader {
public:
    explicit ByteReader(std::vector<std::uint8_t> data) : data_(std::move(data)) {}

    std::uint8_t u8() {
        if (pos_ >= data_.size()) throw DecodeError("gif: unexpected end of file");
        return data_[pos_++];
    }
    std::uint16_t u16le() {
        const std::uint16_t lo = u8();
        const std::uint16_t hi = u8();
        return static_cast<std::uint16_t>(lo | (hi << 8));
    }
    void read(std::uint8_t* out, std::size_t n) {
        if (pos_ + n > data_.size()) throw DecodeError("gif: unexpected end of file");
        std::copy(data_.begin() + pos_, data_.begin() + pos_ + n, out);
        pos_ += n;
    }
    void skip(std::size_t n) {
        if (pos_ + n > data_.size()) throw DecodeError("gif: unexpected end of file");
        pos_ += n;
    }
    bool eof() const { return pos_ >= data_.size(); }

private:
    std::vector<std::uint8_t> data_;
    std::size_t pos_ = 0;
};

using Palette = std::vector<std::array<std::uint8_t, 3>>;

inline Palette read_palette(ByteReader& r, int size_field) {
    Palette pal(static_cast<std::size_t>(2) << size_field);
    for (auto& c : pal) r.read(c.data(), 3);
    return pal;
}

// Concatenated data sub-blocks -> flat byte stream.
inline std::vector<std::uint8_t> read_sub_blocks(ByteReader& r) {
    std::vector<std::uint8_t> out;
    for (;;) {
        const std::uint8_t n = r.u8();
        if (n == 0) return out;
        const std::size_t old = out.size();
        out.resize(old + n);
        r.read(out.data() + old, n);
    }
}

inline std::vector<std::uint8_t> lzw_decode(const std::vector<std::uint8_t>& data,
                                            int min_code_size, std::size_t expected_pixels) {
    if (min_code_size < 2 || min_code_size > 11)
        throw DecodeError("gif: invalid LZW minimum code size");

    const int clear_code = 1 << min_code_size;
    const int eoi_code = clear_code + 1;
    constexpr int kMaxCodes = 4096;

    std::vector<std::int16_t> prefix(kMaxCodes, -1);
    std::vector<std::uint8_t> suffix(kMaxCodes, 0);
    std::vector<std::uint8_t> first(kMaxCodes, 0);
    for (int i = 0; i < clear_code; ++i) {
        suffix[i] = static_cast<std::uint8_t>(i);
        first[i] = static_cast<std::uint8_t>(i);
    }

    std::vector<std::uint8_t> out;
    out.reserve(expected_pixels);

    int code_size = min_code_size + 1;
    int next_code = eoi_code + 1;
    int prev_code = -1;

    std::uint32_t bits = 0;
    int bit_count = 0;
    std::size_t pos = 0;
    std::vector<std::uint8_t> stack;
    stack.reserve(kMaxCodes);

    while (true) {
        while (bit_count < code_size) {
            if (pos >= data.size()) return out;  // tolerate missing EOI
            bits |= static_cast<std::uint32_t>(data[pos++]) << bit_count;
            bit_count += 8;
        }
        const int code = static_cast<int>(bits & ((1u << code_size) - 1));
        bits >>= code_size;
        bit_count -= code_size;

        if (code == clear_code) {
            code_size = min_code_size + 1;
            next_code = eoi_code + 1;
            prev_code = -1;
            continue;
        }
        if (code == eoi_code) return out;
        if (code > next_code || (code == next_code && prev_code < 0))
            throw DecodeError("gif: corrupt LZW stream (bad code)");

        int cur = code;
        if (code == next_code) {  // KwKwK case
            stack.push_back(first[prev_code]);
            cur = prev_code;
        }
        while (cur >= clear_code) {
            stack.push_back(suffix[cur]);
            cur = prefix[cur];
        }
        stack.push_back(suffix[cur]);
        out.insert(out.end(), stack.rbegin(), stack.rend());
        stack.clear();

        if (prev_code >= 0 && next_code < kMaxCodes) {
            prefix[next_code] = static_cast<std::int16_t>(prev_code);
            suffix[next_code] = first[cur];
            first[next_code] = first[prev_code];
            ++next_code;
            if (next_code == (1 << code_size) && code_size < 12) ++code_size;
        }
        prev_code = code;
        if (out.size() > expected_pixels) out.resize(expected_pixels);
    }
}

// Interlaced GIFs store rows in four passes.
inline std::vector<int> interlace_row_order(int height) {
    std::vector<int> rows;
    rows.reserve(height);
    for (int y = 0; y < height; y += 8) rows.push_back(y);
    for (int y = 4; y < height; y += 8) rows.push_back(y);
    for (int y = 2; y < height; y += 4) rows.push_back(y);
    for (int y = 1; y < height; y += 2) rows.push_back(y);
    return rows;
}

}  // namespace gifdetail

inline GifAnimation decode_gif(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DecodeError("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    gifdetail::ByteReader r(std::move(bytes));

    std::uint8_t sig[6];
    r.read(sig, 6);
    if (std::memcmp(sig, "GIF87a", 6) != 0 && std::memcmp(sig, "GIF89a", 6) != 0)
        throw DecodeError("not a GIF file: " + path);

    GifAnimation anim;
    anim.width = r.u16le();
    anim.height = r.u16le();
    if (anim.width < 1 || anim.height < 1)
        throw DecodeError("gif: zero logical screen size in " + path);
    const std::uint8_t lsd_packed = r.u8();
    const std::uint8_t bg_index = r.u8();
    r.u8();  // aspect ratio, unused

    gifdetail::Palette global_palette;
    if (lsd_packed & 0x80)
        global_palette = gifdetail::read_palette(r, lsd_packed & 0x07);

    // Background fill: the background color when a global table exists,
    // black otherwise.
    std::array<std::uint8_t, 3> bg = {0, 0, 0};
    if (!global_palette.empty() && bg_index < global_palette.size())
        bg = global_palette[bg_index];

    Image canvas(anim.width, anim.height);
    for (int y = 0; y < anim.height; ++y)
        for (int x = 0; x < anim.width; ++x)
            canvas.set(x, y, bg[0], bg[1], bg[2]);

    int gce_delay_ms = 0;
    int gce_disposal = 0;
    int gce_transparent = -1;

    while (!r.eof()) {
        const std::uint8_t block = r.u8();
        if (block == 0x3B) break;  // trailer
        if (block == 0x21) {       // extension
            const std::uint8_t label = r.u8();
            if (label == 0xF9) {  // graphic control
                const auto data = gifdetail::read_sub_blocks(r);
                if (data.size() >= 4) {
                    gce_disposal = (data[0] >> 2) & 0x07;
                    gce_delay_ms = (data[1] | (data[2] << 8)) * 10;
                    gce_transparent = (data[0] & 0x01) ? data[3] : -1;
                }
            } else {
                gifdetail::read_sub_blocks(r);  // comment/app/plaintext: skip
            }
            continue;
        }
        if (block != 0x2C) throw DecodeError("gif: unknown block in " + path);

        const int left = r.u16le();
        const int top = r.u16le();
        const int w = r.u16le();
        const int h = r.u16le();
        const std::uint8_t packed = r.u8();

        gifdetail::Palette local_palette;
        if (packed & 0x80) local_palette = gifdetail::read_palette(r, packed & 0x07);
        const gifdetail::Palette& palette =
            local_palette.empty() ? global_palette : local_palette;
        if (palette.empty()) throw DecodeError("gif: image without color table in " + path);

        const int min_code_size = r.u8();
        const auto compressed = gifdetail::read_sub_blocks(r);
        const std::size_t expected = static_cast<std::size_t>(w) * h;
        const auto indices = gifdetail::lzw_decode(compressed, min_code_size, expected);
        if (indices.size() < expected)
            throw DecodeError("gif: truncated image data in " + path);

        Image before_draw;  // only saved when disposal 3 asks for it
        if (gce_disposal == 3) before_draw = canvas;

        const bool interlaced = (packed & 0x40) != 0;
        std::vector<int> row_order;
        if (interlaced) row_order = gifdetail::interlace_row_order(h);

        for (int row = 0; row < h; ++row) {
            const int y = top + (interlaced ? row_order[row] : row);
            if (y < 0 || y >= anim.height) continue;
            for (int x = 0; x < w; ++x) {
                const int cx = left + x;
                if (cx < 0 || cx >= anim.width) continue;
                const std::uint8_t idx = indices[static_cast<std::size_t>(row) * w + x];
                if (static_cast<int>(idx) == gce_transparent) continue;
                if (idx >= palette.size())
                    throw DecodeError("gif: palette index out of range in " + path);
                const auto& c = palette[idx];
                canvas.set(cx, y, c[0], c[1], c[2]);
            }
        }

        anim.frames.push_back(GifFrame{canvas, gce_delay_ms});

        // Disposal prepares the canvas for the NEXT frame.
        if (gce_disposal == 2) {
            for (int y = top; y < top + h && y < anim.height; ++y)
                for (int x = left; x < left + w && x < anim.width; ++x)
                    if (y >= 0 && x >= 0) canvas.set(x, y, bg[0], bg[1], bg[2]);
        } else if (gce_disposal == 3 && !before_draw.empty()) {
            canvas = before_draw;
        }
        gce_delay_ms = 0;
        gce_disposal = 0;
        gce_transparent = -1;
    }

    if (anim.frames.empty()) throw DecodeError("gif: no frames in " + path);
    return anim;
}

// ---------------------------------------------------------------------------
// Encoder

struct GifEncodeFrame {
    Image image;        // placed at (left, top) on the logical screen
    int delay_ms = 100;
    int left = 0;
    int top = 0;
    int disposal = 1;   // 0..3, as in the graphic control extension
};

namespace gifdetail {

class BitPacker {
public:
    void put(int code, int bits) {
        acc_ |= static_cast<std::uint32_t>(code) << count_;
        count_ += bits;
        while (count_ >= 8) {
            bytes_.push_back(static_cast<std::uint8_t>(acc_ & 0xFF));
            acc_ >>= 8;
            count_ -= 8;
        }
    }
    std::vector<std::uint8_t> finish() {
        if (count_ > 0) bytes_.push_back(static_cast<std::uint8_t>(acc_ & 0xFF));
        acc_ = 0;
        count_ = 0;
        return std::move(bytes_);
    }

private:
    std::vector<std::uint8_t> bytes_;
    std::uint32_t acc_ = 0;
    int count_ = 0;
};

inline std::vector<std::uint8_t> lzw_encode(const std::vector<std::uint8_t>& indices,
                                            int min_code_size) {
    const int clear_code = 1 << min_code_size;
    const int eoi_code = clear_code + 1;
    constexpr int kMaxCodes = 4096;

    BitPacker packer;
    int code_size = min_code_size + 1;
    // (prefix code << 8 | next index) -> new code
    std::map<std::uint32_t, int> table;
    int next_code = eoi_code + 1;

    packer.put(clear_code, code_size);
    if (indices.empty()) {
        packer.put(eoi_code, code_size);
        return packer.finish();
    }

    int cur = indices[0];
    for (std::size_t i = 1; i < indices.size(); ++i) {
        const std::uint32_t key = (static_cast<std::uint32_t>(cur) << 8) | indices[i];
        const auto it = table.find(key);
        if (it != table.end()) {
            cur = it->second;
            continue;
        }
        packer.put(cur, code_size);
        if (next_code < kMaxCodes) {
            table.emplace(key, next_code);
            if (next_code == (1 << code_size) && code_size < 12) ++code_size;
            ++next_code;
        } else {
            packer.put(clear_code, code_size);
            table.clear();
            code_size = min_code_size + 1;
            next_code = eoi_code + 1;
        }
        cur = indices[i];
    }
    packer.put(cur, code_size);
    packer.put(eoi_code, code_size);
    return packer.finish();
}

inline void write_u16le(std::vector<std::uint8_t>& out, int v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

inline int palette_size_field(std::size_t colors) {
    int field = 0;  // table size = 2^(field+1)
    while ((static_cast<std::size_t>(2) << field) < colors) ++field;
    return field;
}

}  // namespace gifdetail

// Writes an animated GIF with one exact local color table per frame.
// Throws if any frame uses more than 256 distinct colors.
inline void encode_gif(const std::string& path, int screen_w, int screen_h,
                       const std::vector<GifEncodeFrame>& frames, bool interlace = false,
                       int loop_count = 0) {
    if (frames.empty()) throw ContractError("encode_gif: no frames");

    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'G', 'I', 'F', '8', '9', 'a'});
    gifdetail::write_u16le(out, screen_w);
    gifdetail::write_u16le(out, screen_h);
    out.push_back(0x00);  // no global color table
    out.push_back(0x00);  // background color index
    out.push_back(0x00);  // aspect ratio

    // Netscape looping extension.
    out.insert(out.end(), {0x21, 0xFF, 0x0B});
    out.insert(out.end(), {'N', 'E', 'T', 'S', 'C', 'A', 'P', 'E', '2', '.', '0'});
    out.push_back(0x03);
    out.push_back(0x01);
    gifdetail::write_u16le(out, loop_count);
    out.push_back(0x00);

    for (const auto& f : frames) {
        if (f.image.empty()) throw ContractError("encode_gif: empty frame");

        // Exact palette, first-seen order.
        std::map<std::uint32_t, int> color_index;
        std::vector<std::array<std::uint8_t, 3>> palette;
        const std::size_t n = static_cast<std::size_t>(f.image.width) * f.image.height;
        std::vector<std::uint8_t> indices(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint8_t* p = f.image.pixels.data() + i * 3;
            const std::uint32_t key = (static_cast<std::uint32_t>(p[0]) << 16) |
                                      (static_cast<std::uint32_t>(p[1]) << 8) | p[2];
            auto [it, inserted] = color_index.emplace(key, static_cast<int>(palette.size()));
            if (inserted) {
                if (palette.size() >= 256)
                    throw ContractError("encode_gif: frame exceeds 256 distinct colors");
                palette.push_back({p[0], p[1], p[2]});
            }
            indices[i] = static_cast<std::uint8_t>(it->second);
        }

        // Graphic control extension.
        out.insert(out.end(), {0x21, 0xF9, 0x04});
        out.push_back(static_cast<std::uint8_t>((f.disposal & 0x07) << 2));
        gifdetail::write_u16le(out, std::max(0, f.delay_ms / 10));
        out.push_back(0x00);  // no transparent color
        out.push_back(0x00);

        // Image descriptor.
        out.push_back(0x2C);
        gifdetail::write_u16le(out, f.left);
        gifdetail::write_u16le(out, f.top);
        gifdetail::write_u16le(out, f.image.width);
        gifdetail::write_u16le(out, f.image.height);
        const int size_field = gifdetail::palette_size_field(std::max<std::size_t>(palette.size(), 2));
        out.push_back(static_cast<std::uint8_t>(0x80 | (interlace ? 0x40 : 0x00) | size_field));
        const std::size_t table_colors = static_cast<std::size_t>(2) << size_field;
        for (std::size_t i = 0; i < table_colors; ++i) {
            if (i < palette.size())
                out.insert(out.end(), palette[i].begin(), palette[i].end());
            else
                out.insert(out.end(), {0, 0, 0});
        }

        // Pixel stream, interlace-reordered when requested.
        std::vector<std::uint8_t> stream;
        if (interlace) {
            stream.reserve(n);
            for (int y : gifdetail::interlace_row_order(f.image.height)) {
                const auto* row = indices.data() + static_cast<std::size_t>(y) * f.image.width;
                stream.insert(stream.end(), row, row + f.image.width);
            }
        } else {
            stream = indices;
        }

        int min_code_size = gifdetail::palette_size_field(std::max<std::size_t>(palette.size(), 4)) + 1;
        if (min_code_size < 2) min_code_size = 2;
        out.push_back(static_cast<std::uint8_t>(min_code_size));
        const auto compressed = gifdetail::lzw_encode(stream, min_code_size);
        for (std::size_t off = 0; off < compressed.size(); off += 255) {
            const std::size_t len = std::min<std::size_t>(255, compressed.size() - off);
            out.push_back(static_cast<std::uint8_t>(len));
            out.insert(out.end(), compressed.begin() + off, compressed.begin() + off + len);
        }
        out.push_back(0x00);
    }
    out.push_back(0x3B);

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw DecodeError("cannot write file: " + path);
    file.write(reinterpret_cast<const char*>(out.data()),
               static_cast<std::streamsize>(out.size()));
    if (!file) throw DecodeError("short write: " + path);
}

}  // namespace gifreplay
