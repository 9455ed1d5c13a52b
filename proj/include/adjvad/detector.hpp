#pragma once

// Whole-scene detection: frames are windowed per video, decomposed, assembled
// into MLP inputs and fed to one incremental learner per scene.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adjvad/config.hpp"
#include "adjvad/dwt.hpp"
#include "adjvad/learner.hpp"
#include "adjvad/manifest.hpp"

namespace adjvad {

struct DetectionRecord {
  std::string video_id;
  std::uint64_t frame = 0;  // timestep within the video, >= n - 1
  double detection_mse = 0.0;
  int k_t = 1;
  std::optional<std::filesystem::path> map_path;

  // Learner bookkeeping at the time the frame was processed.
  std::uint64_t learner_t = 0;
  std::uint64_t frame_in_video = 0;
  int iterations = 0;
  double eps_first = 0.0;
  double eps_final = 0.0;
  double loss_first = 0.0;
};

/// Called once per analyzed frame, in order. The record may be modified
/// (for example to attach a map path) before it is stored.
using FrameObserver =
    std::function<void(DetectionRecord& record, const Plane& detection_map,
                       const DwtPyramid& pyramid)>;

/// One learner driven across the ordered videos of a scene. Video 0 starts
/// from init_random(seed). Between videos the state flows through when the
/// scene is continuous and restarts its temporal bookkeeping otherwise; in
/// both cases parameters carry over and the per-video warm-up applies again.
class SceneDetector {
 public:
  SceneDetector(DetectConfig cfg, std::uint64_t seed, bool continuous,
                std::size_t height, std::size_t width);

  /// Starts a new video; frames are pushed with consecutive timesteps from 0.
  void begin_video(std::string video_id);
  std::optional<DetectionRecord> push(Frame frame);

  std::vector<DetectionRecord> process_video(const std::string& video_id,
                                             const std::vector<Frame>& frames);

  void set_observer(FrameObserver observer) { observer_ = std::move(observer); }
  const LearnerState<float>& state() const { return state_; }
  const DetectConfig& config() const { return cfg_; }
  std::size_t videos_started() const { return videos_; }

 private:
  DetectConfig cfg_;
  bool continuous_;
  std::size_t height_, width_;
  Stack grid_;
  WaveletFilter filter_;
  LearnerState<float> state_;
  std::optional<WindowStream> windows_;
  std::string video_id_;
  std::uint64_t next_timestep_ = 0;
  std::size_t videos_ = 0;
  FrameObserver observer_;
};

/// Streams every video of the scene from disk. A missing, unreadable or
/// misnumbered frame aborts the scene with a DataError naming the video.
std::vector<DetectionRecord> run_scene(const SceneEntry& scene, const DetectConfig& cfg,
                                       std::uint64_t seed, FrameObserver observer = {},
                                       MlpParams<float>* final_params = nullptr);

}  // namespace adjvad
