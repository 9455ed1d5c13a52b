#include "adjvad/detector.hpp"

#include "adjvad/errors.hpp"
#include "adjvad/input.hpp"

namespace adjvad {

SceneDetector::SceneDetector(DetectConfig cfg, std::uint64_t seed, bool continuous,
                             std::size_t height, std::size_t width)
    : cfg_(std::move(cfg)),
      continuous_(continuous),
      height_(height),
      width_(width),
      grid_(coord_grid(height, width)),
      filter_(db2_filter()),
      state_{init_random<float>(cfg_.mlp, seed)} {
  cfg_.validate();
}

void SceneDetector::begin_video(std::string video_id) {
  if (videos_ > 0) {
    if (continuous_)
      state_.frame_in_video = 0;
    else
      state_.restart_stream();
  }
  ++videos_;
  video_id_ = std::move(video_id);
  windows_.emplace(cfg_.window);
  next_timestep_ = 0;
}

std::optional<DetectionRecord> SceneDetector::push(Frame frame) {
  if (!windows_) throw StreamError("push() before begin_video()");
  if (frame.values.height != height_ || frame.values.width != width_)
    throw ShapeError("video '" + video_id_ + "' frame " + std::to_string(frame.timestep) +
                     " is " + std::to_string(frame.values.height) + "x" +
                     std::to_string(frame.values.width) + ", scene expects " +
                     std::to_string(height_) + "x" + std::to_string(width_));
  if (frame.timestep != next_timestep_)
    throw StreamError("video '" + video_id_ + "': expected frame " +
                      std::to_string(next_timestep_) + ", got " +
                      std::to_string(frame.timestep));
  ++next_timestep_;
  frame.video_id = video_id_;
  auto window = windows_->push(std::move(frame));
  if (!window) return std::nullopt;

  const DwtPyramid pyramid = analyze_window(*window, filter_);
  const InputTensor input = assemble(grid_, pyramid);

  DetectionRecord rec;
  rec.video_id = video_id_;
  rec.frame = window->current().timestep;
  rec.learner_t = state_.t;
  rec.frame_in_video = state_.frame_in_video;
  StepOutcome<float> out;
  try {
    out = step(window->current().values, input, state_, cfg_.learner);
  } catch (const NumericError& e) {
    throw NumericError("video '" + video_id_ + "' frame " + std::to_string(rec.frame) + ": " +
                       e.what());
  }
  rec.detection_mse = out.detection_mse;
  rec.k_t = out.k_t;
  rec.iterations = out.iterations;
  rec.eps_first = out.eps_first;
  rec.eps_final = out.eps_final;
  rec.loss_first = out.loss_first;
  if (observer_) observer_(rec, out.detection_map, pyramid);
  return rec;
}

std::vector<DetectionRecord> SceneDetector::process_video(const std::string& video_id,
                                                          const std::vector<Frame>& frames) {
  begin_video(video_id);
  std::vector<DetectionRecord> records;
  for (const Frame& f : frames)
    if (auto r = push(f)) records.push_back(std::move(*r));
  return records;
}

std::vector<DetectionRecord> run_scene(const SceneEntry& scene, const DetectConfig& cfg,
                                       std::uint64_t seed, FrameObserver observer,
                                       MlpParams<float>* final_params) {
  SceneDetector det(cfg, seed, scene.continuous, scene.height, scene.width);
  det.set_observer(std::move(observer));
  std::vector<DetectionRecord> records;
  for (const VideoEntry& video : scene.videos) {
    std::vector<std::filesystem::path> files;
    try {
      files = list_frame_files(video.frames_dir);
    } catch (const DataError& e) {
      throw IoError("scene '" + scene.id + "' video '" + video.id + "': " + e.what());
    }
    if (files.empty())
      throw StreamError("scene '" + scene.id + "' video '" + video.id + "' has no frames in " +
                        video.frames_dir.string());
    det.begin_video(video.id);
    for (std::size_t i = 0; i < files.size(); ++i) {
      Frame f;
      try {
        f = load_frame(files[i], scene.height, scene.width);
      } catch (const DataError& e) {
        throw FormatError("scene '" + scene.id + "' video '" + video.id + "': " + e.what());
      }
      f.scene_id = scene.id;
      f.timestep = i;
      if (auto r = det.push(std::move(f))) records.push_back(std::move(*r));
    }
  }
  if (final_params) *final_params = det.state().theta_init;
  return records;
}

}  // namespace adjvad
