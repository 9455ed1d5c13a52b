#include "adjvad/grad.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "adjvad/engine.hpp"
#include "adjvad/errors.hpp"
#include "adjvad/kernels.hpp"

namespace adjvad {

template <typename T>
LossAndGradient<T> backward(const MlpParams<T>& params, const InputTensor& input,
                            const Plane& target, double loss_offset) {
  if (!std::isfinite(loss_offset)) throw NumericError("loss offset is non-finite");
  ReconstructionEngine<T> engine(input);
  engine.set_target(target);
  LossAndGradient<T> out;
  out.mse = engine.evaluate(params);
  out.grad.assign(params.size(), T(0));
  if (out.mse <= loss_offset) return out;
  out.loss = out.mse - loss_offset;
  engine.gradient(params, static_cast<T>(2.0 / static_cast<double>(engine.pixels())),
                  out.grad);
  return out;
}

template LossAndGradient<float> backward<float>(const MlpParams<float>&, const InputTensor&,
                                                const Plane&, double);
template LossAndGradient<double> backward<double>(const MlpParams<double>&,
                                                  const InputTensor&, const Plane&, double);

template <typename T>
void adam_step(std::span<T> params, std::span<const std::type_identity_t<T>> grad,
               AdamState<T>& state) {
  if (params.size() != grad.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw ShapeError("adam_step: parameter, gradient and moment lengths differ");
  for (T g : grad)
    if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");
  ++state.step_count;
  const double t = static_cast<double>(state.step_count);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  kernels::adam(params.data(), grad.data(), state.m.data(), state.v.data(), params.size(),
                static_cast<T>(state.beta1), static_cast<T>(state.beta2),
                static_cast<T>(state.lr), static_cast<T>(bc1), static_cast<T>(bc2),
                static_cast<T>(state.eps_hat));
}

template void adam_step<float>(std::span<float>, std::span<const float>, AdamState<float>&);
template void adam_step<double>(std::span<double>, std::span<const double>,
                                AdamState<double>&);

GradCheckResult gradient_check(const MlpArchitecture& arch, std::size_t h, std::size_t w,
                               std::uint64_t seed, double step, double floor) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> u(-0.5, 0.5);

  InputTensor input;
  input.layout = {2, 1, arch.input_dim - 3, 0};
  input.features = Stack(arch.input_dim, h, w);
  for (double& v : input.features.values) v = u(rng);
  Plane target(h, w);
  for (double& v : target.values) v = u(rng);

  MlpParams<double> params = init_random<double>(arch, seed);
  // Nonzero biases so their gradients are exercised away from the init point.
  for (const LayerShape& s : params.layers())
    for (std::size_t i = 0; i < s.out; ++i) params.flat()[s.bias_offset + i] = 0.1 * u(rng);

  const auto analytic = backward(params, input, target, 0.0);

  auto loss_at = [&](const MlpParams<double>& p) {
    ReconstructionEngine<double> engine(input);
    engine.set_target(target);
    return std::max(engine.evaluate(p), 0.0);
  };

  GradCheckResult result;
  MlpParams<double> probe = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double orig = params.flat()[i];
    probe.flat()[i] = orig + step;
    const double up = loss_at(probe);
    probe.flat()[i] = orig - step;
    const double down = loss_at(probe);
    probe.flat()[i] = orig;
    const double fd = (up - down) / (2.0 * step);
    const double g = analytic.grad[i];
    const double denom = std::max({std::abs(g), std::abs(fd), floor});
    result.max_relative_error = std::max(result.max_relative_error, std::abs(g - fd) / denom);
    ++result.parameters_checked;
  }
  return result;
}

}  // namespace adjvad
