#pragma once

// Labeled synthetic grayscale videos: a smooth static background, slowly
// drifting Gaussian blobs (normal), and fast or popping blobs inside anomaly
// intervals.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adjvad/ingest.hpp"

namespace adjvad {

enum class AnomalyKind { fast_mover, appear_disappear, full_anomalous };

AnomalyKind parse_anomaly_kind(std::string_view name);
std::string_view to_string(AnomalyKind kind);

/// Frames [start, end) are anomalous.
struct AnomalyInterval {
  std::size_t start = 0;
  std::size_t end = 0;
  AnomalyKind kind = AnomalyKind::fast_mover;
};

struct SynthSpec {
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t length = 200;
  std::uint64_t background_seed = 7;
  std::size_t normal_actors = 2;
  double speed_min = 0.2;  // pixels per frame
  double speed_max = 0.5;
  double anomaly_speed = 0.0;  // 0 selects 8 * speed_max
  double blob_sigma = 2.0;     // pixels
  double blob_amplitude = 0.35;
  double anomaly_sigma = 3.0;      // 0 selects blob_sigma
  double anomaly_amplitude = 0.45;  // 0 selects blob_amplitude
  std::vector<AnomalyInterval> anomalies;
  double noise_sigma = 0.002;
  std::uint64_t seed = 1;

  double effective_anomaly_speed() const {
    return anomaly_speed > 0.0 ? anomaly_speed : 8.0 * speed_max;
  }
  double effective_anomaly_sigma() const {
    return anomaly_sigma > 0.0 ? anomaly_sigma : blob_sigma;
  }
  double effective_anomaly_amplitude() const {
    return anomaly_amplitude > 0.0 ? anomaly_amplitude : blob_amplitude;
  }
  /// Throws ConfigError on out-of-range intervals, non-positive speeds, or an
  /// anomaly speed below three times the fastest normal speed.
  void validate() const;
};

struct SynthVideo {
  std::vector<Frame> frames;
  std::vector<int> labels;  // labels[i] belongs to timestep i
  double normal_motion = 0.0;     // mean |I_t - I_{t-1}| over normal frames
  double anomalous_motion = 0.0;  // same over anomalous frames
};

/// Deterministic in spec.seed and spec.background_seed. Throws ConfigError
/// if anomalous inter-frame change is not at least twice the normal change.
SynthVideo generate(const SynthSpec& spec, const std::string& video_id = "video_000",
                    const std::string& scene_id = "synth");

struct SynthDatasetVideo {
  std::string id;
  SynthVideo video;
};

/// Writes <out>/frames/<video>/NNNNNN.pgm (8-bit), <out>/labels.csv
/// (video_id,frame,label) and <out>/manifest.json with one scene.
void write_dataset(const std::vector<SynthDatasetVideo>& videos,
                   const std::filesystem::path& out_dir, const std::string& scene_id,
                   bool continuous);

}  // namespace adjvad
