#pragma once

// Reverse-mode gradient of the comparator loss
//   l(theta) = Relu(mse(error_map(forward(theta, T), I)) - loss_offset)
// and the Adam optimizer that consumes it.

#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

#include "adjvad/input.hpp"
#include "adjvad/mlp.hpp"
#include "adjvad/tensor.hpp"

namespace adjvad {

template <typename T>
using Gradient = std::vector<T>;

template <typename T>
struct LossAndGradient {
  double loss = 0.0;
  double mse = 0.0;
  Gradient<T> grad;
};

/// The Relu is inactive (zero loss, zero gradient) when mse <= loss_offset.
template <typename T>
LossAndGradient<T> backward(const MlpParams<T>& params, const InputTensor& input,
                            const Plane& target, double loss_offset);

template <typename T>
struct AdamState {
  std::vector<T> m;
  std::vector<T> v;
  std::uint64_t step_count = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  double lr = 1e-4;

  AdamState() = default;
  AdamState(std::size_t n, double learning_rate)
      : m(n, T(0)), v(n, T(0)), lr(learning_rate) {}

  /// Zero moments and step counter, keeping hyperparameters.
  void reset(std::size_t n) {
    m.assign(n, T(0));
    v.assign(n, T(0));
    step_count = 0;
  }
};

/// One bias-corrected Adam update in place. Throws NumericError on a
/// non-finite gradient and ShapeError on a length mismatch.
template <typename T>
void adam_step(std::span<T> params, std::span<const std::type_identity_t<T>> grad,
               AdamState<T>& state);

template <typename T>
void adam_step(MlpParams<T>& params, std::span<const std::type_identity_t<T>> grad,
               AdamState<T>& state) {
  adam_step<T>(params.flat(), grad, state);
}

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t parameters_checked = 0;
};

/// Compares backward() against central differences of the loss in 64-bit
/// precision on a random input/target pair. Relative error per entry is
/// |g - fd| / max(|g|, |fd|, floor).
GradCheckResult gradient_check(const MlpArchitecture& arch, std::size_t h, std::size_t w,
                               std::uint64_t seed, double step = 1e-5,
                               double floor = 1e-8);

}  // namespace adjvad
