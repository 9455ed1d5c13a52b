#include "adjvad/input.hpp"

#include <algorithm>

#include "adjvad/errors.hpp"

namespace adjvad {

namespace {

double normalized(std::size_t i, std::size_t n) {
  if (n <= 1) return 0.0;
  return static_cast<double>(i) / static_cast<double>(n - 1) - 0.5;
}

}  // namespace

Stack coord_grid(std::size_t h, std::size_t w) {
  Stack g(2, h, w);
  auto rows = g.channel(0);
  auto cols = g.channel(1);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) {
      rows[r * w + c] = normalized(r, h);
      cols[r * w + c] = normalized(c, w);
    }
  return g;
}

std::string InputLayout::describe() const {
  return "C:" + std::to_string(coords) + ",A:" + std::to_string(appearance) +
         ",B1:" + std::to_string(detail1) + ",B2:" + std::to_string(detail2);
}

std::uint64_t InputLayout::checksum() const { return fnv1a64(describe()); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

InputTensor assemble(const Stack& grid, const DwtPyramid& pyramid) {
  const std::size_t h = grid.height, w = grid.width;
  auto same = [&](const Stack& s) { return s.height == h && s.width == w; };
  if (grid.channels != 2 || !same(pyramid.a1) || !same(pyramid.b1) || !same(pyramid.b2))
    throw ShapeError("coordinate grid and DWT pyramid disagree on spatial size");
  if (pyramid.a1.channels == 0) throw ShapeError("empty level-1 approximation");

  InputTensor t;
  t.layout = {2, 1, pyramid.b1.channels, pyramid.b2.channels};
  t.features = Stack(t.layout.channels(), h, w);
  auto out = t.features.values.begin();
  out = std::copy(grid.values.begin(), grid.values.end(), out);
  const auto a = pyramid.a1.channel(pyramid.a1.channels - 1);
  out = std::copy(a.begin(), a.end(), out);
  out = std::copy(pyramid.b1.values.begin(), pyramid.b1.values.end(), out);
  std::copy(pyramid.b2.values.begin(), pyramid.b2.values.end(), out);
  return t;
}

}  // namespace adjvad
