#pragma once

// Per-pixel MLP input: normalized coordinates, the appearance map (last
// level-1 approximation), and every level-1 and level-2 detail map.

#include <cstdint>
#include <string>

#include "adjvad/dwt.hpp"
#include "adjvad/tensor.hpp"

namespace adjvad {

/// Channel 0 is the row coordinate, channel 1 the column coordinate, both
/// mapped endpoint-inclusively onto [-0.5, 0.5]; a length-1 axis maps to 0.
Stack coord_grid(std::size_t h, std::size_t w);

struct InputLayout {
  std::size_t coords = 2;
  std::size_t appearance = 1;
  std::size_t detail1 = 8;
  std::size_t detail2 = 4;

  std::size_t channels() const { return coords + appearance + detail1 + detail2; }
  /// e.g. "C:2,A:1,B1:8,B2:4"
  std::string describe() const;
  /// FNV-1a over describe(); written into run manifests.
  std::uint64_t checksum() const;

  static InputLayout for_window(std::size_t n) { return {2, 1, n / 2, n / 4}; }
  bool operator==(const InputLayout&) const = default;
};

struct InputTensor {
  Stack features;  // layout.channels() x h x w
  InputLayout layout;

  std::size_t pixels() const { return features.pixels(); }
};

/// Stacks [C, A, B1, B2] with A = a1[a1_count - 1].
InputTensor assemble(const Stack& grid, const DwtPyramid& pyramid);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace adjvad
