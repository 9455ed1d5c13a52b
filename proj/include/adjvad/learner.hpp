#pragma once

// Incremental learner. At every timestep the comparator turns the current
// reconstruction MSE into a loss relative to the previous frame's final MSE,
// the adapter runs bounded Adam iterations on that loss, and the clipper
// interpolates between the pre- and post-adaptation parameters to produce the
// starting point for the next frame.

#include <cstdint>
#include <optional>

#include "adjvad/grad.hpp"
#include "adjvad/input.hpp"
#include "adjvad/mlp.hpp"
#include "adjvad/tensor.hpp"

namespace adjvad {

/// Which iteration count drives the clipper factor k^{-1/2}.
enum class ClipCount {
  current,   // k^t, produced at this timestep
  previous,  // k^{t-1}
};

struct LearnerConfig {
  double eps_bar = 1e-4;   // target MSE
  double loss_bar = 1e-6;  // adapter stops once the loss is at or below this
  int k_bar_warm = 500;    // iteration cap for the first warm_frames of a video
  int k_bar = 100;         // iteration cap afterwards
  int warm_frames = 5;
  double lr_first = 1e-4;  // first analyzed frame of each video
  double lr_rest = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  bool clipper = true;  // false: next start = fitted parameters
  ClipCount clip_count = ClipCount::current;

  /// Throws ConfigError on invalid thresholds or bounds.
  void validate() const;
};

template <typename T>
struct LearnerState {
  MlpParams<T> theta_init;
  std::optional<double> eps_prev;
  std::optional<int> k_prev;
  std::uint64_t t = 0;
  std::uint64_t frame_in_video = 0;

  /// Keeps the parameters, clears the temporal bookkeeping (cold start).
  void restart_stream() {
    eps_prev.reset();
    k_prev.reset();
    t = 0;
    frame_in_video = 0;
  }
};

/// t == 0: Relu(eps - eps_bar). Otherwise Relu(eps - max(eps_prev, eps_bar)).
template <typename T>
double comparator_loss(double eps_current, const LearnerState<T>& state,
                       const LearnerConfig& cfg);

/// The offset subtracted inside the comparator's Relu.
template <typename T>
double loss_offset(const LearnerState<T>& state, const LearnerConfig& cfg);

/// Iteration cap in force for the state's position within its video.
template <typename T>
int iteration_cap(const LearnerState<T>& state, const LearnerConfig& cfg);

template <typename T>
struct AdaptResult {
  MlpParams<T> theta_fitted;
  double eps_final = 0.0;
  int iterations = 0;  // Adam updates performed
  Plane first_map;     // error map of theta_start
  double first_eps = 0.0;
  double first_loss = 0.0;
  Plane final_map;
  double final_loss = 0.0;
};

template <typename T>
AdaptResult<T> adapt(const MlpParams<T>& theta_start, const InputTensor& input,
                     const Plane& target, const LearnerState<T>& state,
                     const LearnerConfig& cfg);

/// theta_init + k^{-1/2} * (theta_fitted - theta_init), elementwise.
template <typename T>
MlpParams<T> clip(const MlpParams<T>& theta_init, const MlpParams<T>& theta_fitted, int k);

template <typename T>
struct StepOutcome {
  Plane detection_map;
  double detection_mse = 0.0;
  int k_t = 1;
  int iterations = 0;
  double eps_first = 0.0;
  double eps_final = 0.0;
  double loss_first = 0.0;
  MlpParams<T> theta_fitted;
  MlpParams<T> theta_next;
};

/// Advances the learner by one frame. The detection map is the
/// post-adaptation map at t == 0 and the pre-adaptation map afterwards. At
/// t == 0 the fitted parameters are handed on unclipped.
template <typename T>
StepOutcome<T> step(const Plane& frame, const InputTensor& input, LearnerState<T>& state,
                    const LearnerConfig& cfg);

}  // namespace adjvad
