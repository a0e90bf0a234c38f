#include <catch2/catch.hpp>

#include "gifreplay/gif.hpp"
#include "test_util.hpp"

using namespace gifreplay;

TEST_CASE("gif round trip, full frames") {
    testutil::TempDir tmp("gif_rt");
    const std::string path = (tmp.path() / "anim.gif").string();

    std::vector<GifEncodeFrame> frames;
    frames.push_back({testutil::solid(24, 16, 255, 0, 0), 70});
    frames.push_back({testutil::solid(24, 16, 0, 255, 0), 70});
    frames.push_back({testutil::checkerboard(24, 16, 3), 140});
    encode_gif(path, 24, 16, frames);

    const GifAnimation anim = decode_gif(path);
    REQUIRE(anim.frames.size() == 3);
    CHECK(anim.width == 24);
    CHECK(anim.height == 16);
    CHECK(anim.frames[0].raster == frames[0].image);
    CHECK(anim.frames[1].raster == frames[1].image);
    CHECK(anim.frames[2].raster == frames[2].image);
    CHECK(anim.frames[0].delay_ms == 70);
    CHECK(anim.frames[2].delay_ms == 140);
}

TEST_CASE("gif interlaced round trip") {
    testutil::TempDir tmp("gif_il");
    const std::string path = (tmp.path() / "il.gif").string();

    // Odd height exercises every interlace pass.
    const Image img = testutil::checkerboard(17, 13, 2);
    encode_gif(path, 17, 13, {{img, 50}}, /*interlace=*/true);
    const GifAnimation anim = decode_gif(path);
    REQUIRE(anim.frames.size() == 1);
    CHECK(anim.frames[0].raster == img);
}

TEST_CASE("gif partial updates composite onto the previous canvas") {
    testutil::TempDir tmp("gif_disp");
    const std::string path = (tmp.path() / "part.gif").string();

    // Frame 1: full blue canvas. Frame 2: small red patch at (4, 2),
    // disposal "leave". The decoded frame 2 must be the full canvas with
    // the patch applied, not just the patch.
    std::vector<GifEncodeFrame> frames;
    frames.push_back({testutil::solid(12, 8, 0, 0, 200), 30, 0, 0, 1});
    frames.push_back({testutil::solid(3, 3, 250, 10, 10), 30, 4, 2, 1});
    encode_gif(path, 12, 8, frames);

    const GifAnimation anim = decode_gif(path);
    REQUIRE(anim.frames.size() == 2);
    const Image& f2 = anim.frames[1].raster;
    REQUIRE(f2.width == 12);
    CHECK(static_cast<int>(f2.at(0, 0)[2]) == 200);   // untouched canvas
    CHECK(static_cast<int>(f2.at(5, 3)[0]) == 250);   // patch
    CHECK(static_cast<int>(f2.at(11, 7)[2]) == 200);  // untouched canvas
}

TEST_CASE("gif disposal restore-previous") {
    testutil::TempDir tmp("gif_d3");
    const std::string path = (tmp.path() / "d3.gif").string();

    // The patch frame uses disposal 3 (restore previous); the third frame
    // is another patch elsewhere, so it must land on the *original* canvas.
    std::vector<GifEncodeFrame> frames;
    frames.push_back({testutil::solid(10, 10, 0, 200, 0), 30, 0, 0, 1});
    frames.push_back({testutil::solid(2, 2, 255, 255, 255), 30, 1, 1, 3});
    frames.push_back({testutil::solid(2, 2, 0, 0, 255), 30, 6, 6, 1});
    encode_gif(path, 10, 10, frames);

    const GifAnimation anim = decode_gif(path);
    REQUIRE(anim.frames.size() == 3);
    CHECK(static_cast<int>(anim.frames[1].raster.at(1, 1)[0]) == 255);
    // After restore-previous, the white patch is gone in frame 3.
    CHECK(static_cast<int>(anim.frames[2].raster.at(1, 1)[1]) == 200);
    CHECK(static_cast<int>(anim.frames[2].raster.at(6, 6)[2]) == 255);
}

TEST_CASE("gif encoder rejects palette overflow") {
    testutil::TempDir tmp("gif_pal");
    Image img(32, 32);
    int i = 0;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x, ++i)
            img.set(x, y, static_cast<std::uint8_t>(i & 0xFF),
                    static_cast<std::uint8_t>((i >> 8) & 0xFF), 0);
    CHECK_THROWS_AS(encode_gif((tmp.path() / "x.gif").string(), 32, 32, {{img, 10}}),
                    ContractError);
}

TEST_CASE("gif decode rejects non-gif bytes") {
    testutil::TempDir tmp("gif_bad");
    const std::string path = (tmp.path() / "bad.gif").string();
    {
        std::ofstream out(path, std::ios::binary);
        out << "definitely not a gif";
    }
    CHECK_THROWS_AS(decode_gif(path), DecodeError);
    CHECK_THROWS_AS(decode_gif((tmp.path() / "missing.gif").string()), DecodeError);
}

TEST_CASE("gif encoder output is byte-stable") {
    testutil::TempDir tmp("gif_det");
    const std::string p1 = (tmp.path() / "a.gif").string();
    const std::string p2 = (tmp.path() / "b.gif").string();
    const Image img = testutil::checkerboard(40, 30, 5);
    encode_gif(p1, 40, 30, {{img, 80}});
    encode_gif(p2, 40, 30, {{img, 80}});

    std::ifstream a(p1, std::ios::binary), b(p2, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    CHECK(!sa.empty());
}
