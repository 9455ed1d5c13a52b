#pragma once

// JSON configuration for detection runs and synthetic dataset generation.
//
// Detection config (every key optional; unknown keys are rejected):
//   {"window": 16,
//    "mlp": {"hidden_layers": 4, "hidden_width": 256, "omega0": 30},
//    "learner": {"eps_bar": 1e-4, "loss_bar": 1e-6, "k_bar_warm": 500,
//                "k_bar": 100, "warm_frames": 5, "lr_first": 1e-4,
//                "lr_rest": 1e-5, "beta1": 0.9, "beta2": 0.999,
//                "adam_eps": 1e-8, "clipper": true, "clip_k": "current"}}
//
// Synth spec: top-level SynthSpec fields act as defaults for every entry of
// "videos"; each entry carries an "id" and may override any field.
//   {"scene_id": "synth", "continuous": false,
//    "height": 32, "width": 32, "length": 200, "seed": 1,
//    "anomalies": [{"start": 80, "end": 121, "kind": "fast_mover"}],
//    "videos": [{"id": "video_000"}, {"id": "video_001", "seed": 2}]}

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adjvad/learner.hpp"
#include "adjvad/mlp.hpp"
#include "adjvad/synth.hpp"

namespace adjvad {

struct DetectConfig {
  std::size_t window = kDefaultWindow;
  MlpArchitecture mlp;  // input_dim follows from window
  LearnerConfig learner;

  InputLayout layout() const { return InputLayout::for_window(window); }
  /// Throws ConfigError.
  void validate() const;
};

DetectConfig parse_config(const std::string& text);
DetectConfig load_config(const std::filesystem::path& path);

/// Canonical JSON with every field spelled out; the config hash is computed
/// over these bytes.
std::string to_json(const DetectConfig& cfg);
std::uint64_t config_hash(const DetectConfig& cfg);

ClipCount parse_clip_count(std::string_view name);
std::string_view to_string(ClipCount c);

struct SynthJob {
  std::string scene_id = "synth";
  bool continuous = false;
  std::vector<std::pair<std::string, SynthSpec>> videos;
};

SynthJob parse_synth_job(const std::string& text);
SynthJob load_synth_job(const std::filesystem::path& path);

}  // namespace adjvad
