#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace adjvad {

/// Row-major h x w grid of doubles.
struct Plane {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  Plane() = default;
  Plane(std::size_t h, std::size_t w, double fill = 0.0)
      : height(h), width(w), values(h * w, fill) {}

  std::size_t size() const { return values.size(); }
  double& at(std::size_t r, std::size_t c) { return values[r * width + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * width + c]; }

  bool operator==(const Plane&) const = default;
};

/// Channel-major c x h x w tensor of doubles. Channel i occupies the
/// contiguous range [i * h * w, (i + 1) * h * w).
struct Stack {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;

  Stack() = default;
  Stack(std::size_t c, std::size_t h, std::size_t w, double fill = 0.0)
      : channels(c), height(h), width(w), values(c * h * w, fill) {}

  std::size_t pixels() const { return height * width; }
  std::span<double> channel(std::size_t i) {
    return {values.data() + i * pixels(), pixels()};
  }
  std::span<const double> channel(std::size_t i) const {
    return {values.data() + i * pixels(), pixels()};
  }

  bool operator==(const Stack&) const = default;
};

}  // namespace adjvad
