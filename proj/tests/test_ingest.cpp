#include <gtest/gtest.h>

#include <fstream>

#include "adjvad/errors.hpp"
#include "adjvad/ingest.hpp"
#include "test_support.hpp"

using namespace adjvad;
namespace fs = std::filesystem;

namespace {

RawFrame gray(std::size_t h, std::size_t w, std::uint16_t fill = 0, int depth = 8) {
  return RawFrame{w, h, 1, depth, std::vector<std::uint16_t>(w * h, fill)};
}

std::vector<Frame> frames(std::size_t count, std::uint64_t first = 0) {
  std::vector<Frame> out;
  for (std::size_t i = 0; i < count; ++i) {
    Frame f;
    f.values = Plane(16, 16, 0.0);
    f.video_id = "v";
    f.timestep = first + i;
    out.push_back(f);
  }
  return out;
}

}  // namespace

TEST(Grayscale, SingleChannelIsIdentity) {
  RawFrame g = gray(16, 16, 7);
  g.pixels[5] = 200;
  EXPECT_EQ(to_grayscale(g), g);
}

TEST(Grayscale, WhiteStaysWhite) {
  RawFrame rgb{16, 16, 3, 8, std::vector<std::uint16_t>(16 * 16 * 3, 255)};
  const RawFrame g = to_grayscale(rgb);
  EXPECT_EQ(g.channels, 1u);
  for (auto v : g.pixels) EXPECT_EQ(v, 255);
}

TEST(Grayscale, LumaWeights) {
  RawFrame rgb{16, 16, 3, 8, {}};
  for (int i = 0; i < 256; ++i) rgb.pixels.insert(rgb.pixels.end(), {100, 50, 200});
  // 29.9 + 29.35 + 22.8 = 82.05
  for (auto v : to_grayscale(rgb).pixels) EXPECT_EQ(v, 82);
}

TEST(Grayscale, RejectsOtherChannelCounts) {
  RawFrame two{16, 16, 2, 8, std::vector<std::uint16_t>(512, 0)};
  EXPECT_THROW(to_grayscale(two), FormatError);
}

TEST(Resize, IdentityWhenSizesMatch) {
  RawFrame f = gray(24, 36);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) f.pixels[i] = static_cast<std::uint16_t>(i % 251);
  EXPECT_EQ(resize(f, 24, 36), f);
}

TEST(Resize, ConstantFrameStaysConstant) {
  const RawFrame f = gray(20, 30, 123);
  for (auto [h, w] : {std::pair{16, 16}, {40, 17}, {64, 64}})
    for (auto v : resize(f, h, w).pixels) EXPECT_EQ(v, 123);
}

TEST(Resize, TargetBelowSixteenIsConfigError) {
  EXPECT_THROW(resize(gray(32, 32), 15, 32), ConfigError);
  EXPECT_THROW(resize(gray(32, 32), 32, 8), ConfigError);
}

TEST(Resize, BilinearHandTable) {
  // v(r, c) = 40 r + 20 c on a 4x4 grid, upscaled 2x with half-pixel centres:
  // output d samples source (d + 0.5) / 2 - 0.5, clamped to [0, 3].
  RawFrame src = gray(4, 4);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) src.pixels[r * 4 + c] = static_cast<std::uint16_t>(40 * r + 20 * c);
  const std::uint16_t expect[8][8] = {
      {0, 5, 15, 25, 35, 45, 55, 60},          {10, 15, 25, 35, 45, 55, 65, 70},
      {30, 35, 45, 55, 65, 75, 85, 90},        {50, 55, 65, 75, 85, 95, 105, 110},
      {70, 75, 85, 95, 105, 115, 125, 130},    {90, 95, 105, 115, 125, 135, 145, 150},
      {110, 115, 125, 135, 145, 155, 165, 170}, {120, 125, 135, 145, 155, 165, 175, 180}};
  const RawFrame out = detail::bilinear_resample(src, 8, 8);
  ASSERT_EQ(out.height, 8u);
  ASSERT_EQ(out.width, 8u);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) EXPECT_EQ(out.at(r, c), expect[r][c]) << r << "," << c;
}

TEST(Rescale, Endpoints) {
  RawFrame f = gray(16, 16);
  f.pixels[0] = 0;
  f.pixels[1] = 255;
  f.pixels[2] = 128;
  const Frame out = rescale(f);
  EXPECT_DOUBLE_EQ(out.values.values[0], -0.5);
  EXPECT_DOUBLE_EQ(out.values.values[1], 0.5);
  EXPECT_NEAR(out.values.values[2], 0.00196, 1e-5);
  RawFrame deep = gray(16, 16, 65535, 16);
  EXPECT_DOUBLE_EQ(rescale(deep).values.values[0], 0.5);
}

TEST(Rescale, QuantizeRoundTrip) {
  for (int depth : {8, 16}) {
    RawFrame f = gray(16, 16, 0, depth);
    for (std::size_t i = 0; i < f.pixels.size(); ++i)
      f.pixels[i] = static_cast<std::uint16_t>((i * 997) % (f.max_value() + 1u));
    const Frame r = rescale(f);
    for (double v : r.values.values) {
      EXPECT_GE(v, -0.5);
      EXPECT_LE(v, 0.5);
    }
    EXPECT_EQ(quantize(r.values, depth).pixels, f.pixels);
  }
}

TEST(WindowStream, Counts) {
  EXPECT_TRUE(window_stream(frames(15)).empty());
  auto one = window_stream(frames(16));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].current().timestep, 15u);
  auto five = window_stream(frames(20));
  ASSERT_EQ(five.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(five[i].length(), 16u);
    EXPECT_EQ(five[i].current().timestep, 15 + i);
    EXPECT_EQ(five[i][0].timestep, i);
  }
  // Consecutive windows share n - 1 frames.
  EXPECT_EQ(five[1].frames[0], five[0].frames[1]);
}

TEST(WindowStream, RejectsGapsAndDuplicates) {
  auto f = frames(10);
  f[4].timestep = 3;
  EXPECT_THROW(window_stream(f), StreamError);
  auto g = frames(10);
  g[6].timestep = 9;
  EXPECT_THROW(window_stream(g), StreamError);
}

TEST(WindowStream, WindowLengthRules) {
  EXPECT_THROW(WindowStream(6), ConfigError);
  EXPECT_THROW(WindowStream(15), ConfigError);
  EXPECT_NO_THROW(WindowStream(8));
  EXPECT_EQ(window_stream(frames(12), 8).size(), 5u);
}

TEST(ImageIo, PgmRoundTrip8And16) {
  const fs::path dir = adjvad::testing::scratch_dir();
  for (int depth : {8, 16}) {
    RawFrame f = gray(17, 23, 0, depth);
    for (std::size_t i = 0; i < f.pixels.size(); ++i)
      f.pixels[i] = static_cast<std::uint16_t>((i * 4099) % (f.max_value() + 1u));
    const fs::path p = dir / ("f" + std::to_string(depth) + ".pgm");
    write_pgm(p, f);
    EXPECT_EQ(read_image(p), f);
  }
}

TEST(ImageIo, PngRoundTripGrayAndRgb) {
  const fs::path dir = adjvad::testing::scratch_dir();
  RawFrame g = gray(16, 20);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) g.pixels[i] = static_cast<std::uint16_t>(i % 256);
  write_png(dir / "g.png", g);
  EXPECT_EQ(read_image(dir / "g.png"), g);

  RawFrame rgb{18, 16, 3, 8, {}};
  for (std::size_t i = 0; i < 18 * 16 * 3; ++i) rgb.pixels.push_back(static_cast<std::uint16_t>((i * 7) % 256));
  write_png(dir / "c.png", rgb);
  EXPECT_EQ(read_image(dir / "c.png"), rgb);
}

TEST(ImageIo, Errors) {
  const fs::path dir = adjvad::testing::scratch_dir();
  EXPECT_THROW(read_image(dir / "missing.pgm"), IoError);
  std::ofstream(dir / "bad.pgm") << "P2\n16 16\n255\n0 0 0";
  EXPECT_THROW(read_image(dir / "bad.pgm"), FormatError);
  std::ofstream(dir / "short.pgm", std::ios::binary) << "P5\n16 16\n255\n" << std::string(10, 'x');
  EXPECT_THROW(read_image(dir / "short.pgm"), FormatError);
  std::ofstream(dir / "junk.png", std::ios::binary) << "not a png";
  EXPECT_THROW(read_image(dir / "junk.png"), FormatError);
  write_pgm(dir / "tiny.pgm", gray(4, 4));
  EXPECT_THROW(load_frame(dir / "tiny.pgm", 16, 16), FormatError);
}

TEST(ImageIo, FrameListingAndLoad) {
  const fs::path dir = adjvad::testing::scratch_dir();
  for (const char* name : {"b_002.pgm", "a_010.png", "a_002.pgm", "notes.txt"}) {
    if (std::string(name).ends_with(".txt")) {
      std::ofstream(dir / name) << "x";
    } else if (std::string(name).ends_with(".png")) {
      write_png(dir / name, gray(16, 16, 255));
    } else {
      write_pgm(dir / name, gray(16, 16, 0));
    }
  }
  const auto files = list_frame_files(dir);
  ASSERT_EQ(files.size(), 3u);
  EXPECT_EQ(files[0].filename(), "a_002.pgm");
  EXPECT_EQ(files[1].filename(), "a_010.png");
  EXPECT_EQ(files[2].filename(), "b_002.pgm");
  const Frame f = load_frame(files[1], 32, 20);
  EXPECT_EQ(f.values.height, 32u);
  EXPECT_EQ(f.values.width, 20u);
  for (double v : f.values.values) EXPECT_DOUBLE_EQ(v, 0.5);
  EXPECT_THROW(list_frame_files(dir / "nope"), IoError);
}
