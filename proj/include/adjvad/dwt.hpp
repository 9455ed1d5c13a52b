#pragma once

// Two-level temporal discrete wavelet transform, applied independently to the
// time series of every pixel of a frame window.
//
// Convention: periodized (circular) analysis with taps anchored at even
// indices, so output k of a level reads inputs 2k .. 2k+3 (mod m):
//   approx[k] = sum_j lowpass[j]  * x[(2k + j) mod m]
//   detail[k] = sum_j highpass[j] * x[(2k + j) mod m]
// Each level halves the length exactly; the transform is orthogonal.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "adjvad/ingest.hpp"
#include "adjvad/tensor.hpp"

namespace adjvad {

struct WaveletFilter {
  std::array<double, 4> lowpass{};
  std::array<double, 4> highpass{};
  std::string name;
};

/// Daubechies-2 (four taps). highpass[i] = (-1)^i * lowpass[3 - i].
WaveletFilter db2_filter();

struct DwtBands {
  std::vector<double> approx;
  std::vector<double> detail;
};

/// One analysis level on a 1-D signal; m must be even and >= 4.
DwtBands dwt_level(std::span<const double> signal, const WaveletFilter& filter);

/// Synthesis (transpose of the analysis operator).
std::vector<double> inverse_dwt_level(std::span<const double> approx,
                                      std::span<const double> detail,
                                      const WaveletFilter& filter);

struct DwtPyramid {
  Stack a1, b1;  // m/2 maps each
  Stack a2, b2;  // m/4 maps each
};

/// One analysis level along the channel (time) axis of a stack.
std::pair<Stack, Stack> dwt_level(const Stack& series, const WaveletFilter& filter);

/// Level 1 on the series, level 2 on the level-1 approximation.
DwtPyramid analyze(const Stack& series, const WaveletFilter& filter);

DwtPyramid analyze_window(const FrameWindow& window, const WaveletFilter& filter);

/// Stacks the frames of a window along the time axis.
Stack window_to_stack(const FrameWindow& window);

}  // namespace adjvad
