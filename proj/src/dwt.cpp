#include "adjvad/dwt.hpp"

#include <cmath>

#include "adjvad/errors.hpp"
#include "adjvad/kernels.hpp"

namespace adjvad {

WaveletFilter db2_filter() {
  const double s3 = std::sqrt(3.0);
  const double d = 4.0 * std::sqrt(2.0);
  WaveletFilter f;
  f.name = "db2";
  f.lowpass = {(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d};
  for (std::size_t i = 0; i < 4; ++i)
    f.highpass[i] = (i % 2 == 0 ? 1.0 : -1.0) * f.lowpass[3 - i];
  return f;
}

namespace {

void check_length(std::size_t m) {
  if (m < 4 || m % 2 != 0)
    throw ShapeError("DWT level needs an even length >= 4, got " + std::to_string(m));
}

}  // namespace

std::pair<Stack, Stack> dwt_level(const Stack& series, const WaveletFilter& filter) {
  const std::size_t m = series.channels;
  check_length(m);
  const std::size_t half = m / 2;
  const std::size_t px = series.pixels();
  Stack approx(half, series.height, series.width);
  Stack detail(half, series.height, series.width);
  for (std::size_t k = 0; k < half; ++k) {
    double* a = approx.channel(k).data();
    double* b = detail.channel(k).data();
    for (std::size_t j = 0; j < 4; ++j) {
      const double* x = series.channel((2 * k + j) % m).data();
      kernels::axpy(filter.lowpass[j], x, a, px);
      kernels::axpy(filter.highpass[j], x, b, px);
    }
  }
  return {std::move(approx), std::move(detail)};
}

DwtBands dwt_level(std::span<const double> signal, const WaveletFilter& filter) {
  Stack s(signal.size(), 1, 1);
  std::copy(signal.begin(), signal.end(), s.values.begin());
  auto [a, d] = dwt_level(s, filter);
  return {std::move(a.values), std::move(d.values)};
}

std::vector<double> inverse_dwt_level(std::span<const double> approx,
                                      std::span<const double> detail,
                                      const WaveletFilter& filter) {
  if (approx.size() != detail.size())
    throw ShapeError("inverse DWT: approx has " + std::to_string(approx.size()) +
                     " coefficients, detail has " + std::to_string(detail.size()));
  const std::size_t m = 2 * approx.size();
  check_length(m);
  std::vector<double> x(m, 0.0);
  for (std::size_t k = 0; k < approx.size(); ++k)
    for (std::size_t j = 0; j < 4; ++j)
      x[(2 * k + j) % m] += filter.lowpass[j] * approx[k] + filter.highpass[j] * detail[k];
  return x;
}

DwtPyramid analyze(const Stack& series, const WaveletFilter& filter) {
  DwtPyramid p;
  std::tie(p.a1, p.b1) = dwt_level(series, filter);
  std::tie(p.a2, p.b2) = dwt_level(p.a1, filter);
  return p;
}

Stack window_to_stack(const FrameWindow& window) {
  if (window.length() == 0) throw ShapeError("empty frame window");
  const Plane& first = window[0].values;
  Stack s(window.length(), first.height, first.width);
  for (std::size_t t = 0; t < window.length(); ++t) {
    const Plane& p = window[t].values;
    if (p.height != first.height || p.width != first.width)
      throw ShapeError("frame window mixes resolutions");
    std::copy(p.values.begin(), p.values.end(), s.channel(t).begin());
  }
  return s;
}

DwtPyramid analyze_window(const FrameWindow& window, const WaveletFilter& filter) {
  if (window.length() < 8 || window.length() % 2 != 0)
    throw ShapeError("frame window length must be even and >= 8, got " +
                     std::to_string(window.length()));
  return analyze(window_to_stack(window), filter);
}

}  // namespace adjvad
