#include "adjvad/learner.hpp"

#include <algorithm>
#include <cmath>

#include "adjvad/engine.hpp"
#include "adjvad/errors.hpp"

namespace adjvad {

void LearnerConfig::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(eps_bar)) throw ConfigError("eps_bar must be > 0");
  if (!positive(loss_bar)) throw ConfigError("loss_bar must be > 0");
  if (k_bar_warm < 1 || k_bar < 1) throw ConfigError("iteration caps must be >= 1");
  if (warm_frames < 0) throw ConfigError("warm_frames must be >= 0");
  if (!positive(lr_rest) || !positive(lr_first) || lr_first < lr_rest)
    throw ConfigError("learning rates must satisfy lr_first >= lr_rest > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("Adam betas must lie in [0, 1)");
  if (!positive(adam_eps)) throw ConfigError("adam_eps must be > 0");
}

template <typename T>
double loss_offset(const LearnerState<T>& state, const LearnerConfig& cfg) {
  if (state.t == 0 || !state.eps_prev) return cfg.eps_bar;
  return std::max(*state.eps_prev, cfg.eps_bar);
}

template <typename T>
double comparator_loss(double eps_current, const LearnerState<T>& state,
                       const LearnerConfig& cfg) {
  return std::max(eps_current - loss_offset(state, cfg), 0.0);
}

template <typename T>
int iteration_cap(const LearnerState<T>& state, const LearnerConfig& cfg) {
  return state.frame_in_video < static_cast<std::uint64_t>(cfg.warm_frames) ? cfg.k_bar_warm
                                                                           : cfg.k_bar;
}

template <typename T>
AdaptResult<T> adapt(const MlpParams<T>& theta_start, const InputTensor& input,
                     const Plane& target, const LearnerState<T>& state,
                     const LearnerConfig& cfg) {
  const double offset = loss_offset(state, cfg);
  const int cap = iteration_cap(state, cfg);

  ReconstructionEngine<T> engine(input);
  engine.set_target(target);
  AdamState<T> adam(theta_start.size(), state.frame_in_video == 0 ? cfg.lr_first : cfg.lr_rest);
  adam.beta1 = cfg.beta1;
  adam.beta2 = cfg.beta2;
  adam.eps_hat = cfg.adam_eps;

  AdaptResult<T> r{theta_start, 0.0, 0, {}, 0.0, 0.0, {}, 0.0};
  std::vector<T> grad(theta_start.size());
  const T coef = static_cast<T>(2.0 / static_cast<double>(engine.pixels()));
  for (int i = 0;; ++i) {
    double eps = 0.0;
    try {
      eps = engine.evaluate(r.theta_fitted);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at adapter iteration " + std::to_string(i));
    }
    const double loss = std::max(eps - offset, 0.0);
    if (i == 0) {
      r.first_map = engine.error_map();
      r.first_eps = eps;
      r.first_loss = loss;
    }
    if (loss <= cfg.loss_bar || i >= cap) {
      r.eps_final = eps;
      r.final_loss = loss;
      r.iterations = i;
      r.final_map = i == 0 ? r.first_map : engine.error_map();
      return r;
    }
    try {
      engine.gradient(r.theta_fitted, coef, grad);
      adam_step(r.theta_fitted, std::span<const T>(grad), adam);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at adapter iteration " + std::to_string(i));
    }
  }
}

template <typename T>
MlpParams<T> clip(const MlpParams<T>& theta_init, const MlpParams<T>& theta_fitted, int k) {
  if (k < 1) throw ConfigError("clip requires k >= 1");
  if (!(theta_init.arch() == theta_fitted.arch()))
    throw ShapeError("clip: parameter layouts differ");
  const double factor = 1.0 / std::sqrt(static_cast<double>(k));
  MlpParams<T> out = theta_init;
  auto o = out.flat();
  const auto a = theta_init.flat();
  const auto b = theta_fitted.flat();
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double ai = a[i];
    o[i] = static_cast<T>(ai + factor * (static_cast<double>(b[i]) - ai));
  }
  return out;
}

template <typename T>
StepOutcome<T> step(const Plane& frame, const InputTensor& input, LearnerState<T>& state,
                    const LearnerConfig& cfg) {
  if (state.t == 0 ? (state.eps_prev || state.k_prev) : (!state.eps_prev || !state.k_prev))
    throw ConfigError("learner state is inconsistent with its timestep");

  AdaptResult<T> fit = adapt(state.theta_init, input, frame, state, cfg);
  StepOutcome<T> out;
  out.iterations = fit.iterations;
  out.k_t = std::max(fit.iterations, 1);
  out.eps_first = fit.first_eps;
  out.eps_final = fit.eps_final;
  out.loss_first = fit.first_loss;

  if (state.t == 0) {
    out.detection_map = std::move(fit.final_map);
    out.theta_next = fit.theta_fitted;
  } else {
    out.detection_map = std::move(fit.first_map);
    if (!cfg.clipper) {
      out.theta_next = fit.theta_fitted;
    } else {
      const int k = cfg.clip_count == ClipCount::current ? out.k_t : *state.k_prev;
      out.theta_next = clip(state.theta_init, fit.theta_fitted, k);
    }
  }
  out.detection_mse = mse(out.detection_map);
  out.theta_fitted = std::move(fit.theta_fitted);

  state.theta_init = out.theta_next;
  state.eps_prev = out.eps_final;
  state.k_prev = out.k_t;
  ++state.t;
  ++state.frame_in_video;
  return out;
}

#define ADJVAD_INSTANTIATE(T)                                                              \
  template double loss_offset<T>(const LearnerState<T>&, const LearnerConfig&);            \
  template double comparator_loss<T>(double, const LearnerState<T>&, const LearnerConfig&); \
  template int iteration_cap<T>(const LearnerState<T>&, const LearnerConfig&);             \
  template AdaptResult<T> adapt<T>(const MlpParams<T>&, const InputTensor&, const Plane&,  \
                                   const LearnerState<T>&, const LearnerConfig&);          \
  template MlpParams<T> clip<T>(const MlpParams<T>&, const MlpParams<T>&, int);            \
  template StepOutcome<T> step<T>(const Plane&, const InputTensor&, LearnerState<T>&,      \
                                  const LearnerConfig&);

ADJVAD_INSTANTIATE(float)
ADJVAD_INSTANTIATE(double)

#undef ADJVAD_INSTANTIATE

}  // namespace adjvad
