#include <gtest/gtest.h>

#include <random>

#include "adjvad/errors.hpp"
#include "adjvad/input.hpp"

using namespace adjvad;

TEST(CoordGrid, Values) {
  const Stack g2 = coord_grid(2, 2);
  EXPECT_EQ(g2.channels, 2u);
  EXPECT_DOUBLE_EQ(g2.channel(0)[0], -0.5);
  EXPECT_DOUBLE_EQ(g2.channel(0)[2], 0.5);
  EXPECT_DOUBLE_EQ(g2.channel(1)[0], -0.5);
  EXPECT_DOUBLE_EQ(g2.channel(1)[1], 0.5);

  const Stack g3 = coord_grid(3, 1);
  EXPECT_DOUBLE_EQ(g3.channel(0)[0], -0.5);
  EXPECT_DOUBLE_EQ(g3.channel(0)[1], 0.0);
  EXPECT_DOUBLE_EQ(g3.channel(0)[2], 0.5);
  for (double v : g3.channel(1)) EXPECT_EQ(v, 0.0);

  const Stack g5 = coord_grid(5, 4);
  EXPECT_DOUBLE_EQ(g5.channel(0)[1 * 4 + 2], -0.25);
  EXPECT_DOUBLE_EQ(g5.channel(1)[1 * 4 + 2], 2.0 / 3.0 - 0.5);
  for (double v : g5.values) {
    EXPECT_GE(v, -0.5);
    EXPECT_LE(v, 0.5);
  }
}

TEST(InputLayout, DefaultChannelsAndChecksum) {
  const InputLayout l = InputLayout::for_window(16);
  EXPECT_EQ(l.channels(), 15u);
  EXPECT_EQ(l.describe(), "C:2,A:1,B1:8,B2:4");
  EXPECT_EQ(l.checksum(), fnv1a64("C:2,A:1,B1:8,B2:4"));
  EXPECT_NE(l.checksum(), InputLayout::for_window(8).checksum());
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Assemble, ChannelOrderAndAppearance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  DwtPyramid p{Stack(8, 3, 4), Stack(8, 3, 4), Stack(4, 3, 4), Stack(4, 3, 4)};
  for (Stack* s : {&p.a1, &p.b1, &p.a2, &p.b2})
    for (double& v : s->values) v = u(rng);
  const Stack grid = coord_grid(3, 4);
  const InputTensor t = assemble(grid, p);
  ASSERT_EQ(t.features.channels, 15u);
  EXPECT_EQ(t.layout, InputLayout::for_window(16));
  auto same = [](std::span<const double> a, std::span<const double> b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  };
  EXPECT_TRUE(same(t.features.channel(0), grid.channel(0)));
  EXPECT_TRUE(same(t.features.channel(1), grid.channel(1)));
  EXPECT_TRUE(same(t.features.channel(2), p.a1.channel(7)));
  for (std::size_t k = 0; k < 8; ++k) EXPECT_TRUE(same(t.features.channel(3 + k), p.b1.channel(k)));
  for (std::size_t k = 0; k < 4; ++k) EXPECT_TRUE(same(t.features.channel(11 + k), p.b2.channel(k)));
}

TEST(Assemble, ZeroPyramid) {
  DwtPyramid p{Stack(8, 4, 4), Stack(8, 4, 4), Stack(4, 4, 4), Stack(4, 4, 4)};
  const InputTensor t = assemble(coord_grid(4, 4), p);
  for (std::size_t c = 2; c < 15; ++c)
    for (double v : t.features.channel(c)) EXPECT_EQ(v, 0.0);
}

TEST(Assemble, DimensionMismatch) {
  DwtPyramid p{Stack(8, 4, 4), Stack(8, 4, 4), Stack(4, 4, 4), Stack(4, 4, 4)};
  EXPECT_THROW(assemble(coord_grid(4, 5), p), ShapeError);
  p.b2 = Stack(4, 3, 4);
  EXPECT_THROW(assemble(coord_grid(4, 4), p), ShapeError);
}
