#pragma once

// Frame-level ROC-AUC over per-frame anomaly scores.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adjvad/outputs.hpp"

namespace adjvad {

/// Mann-Whitney statistic: P(score_pos > score_neg) + P(equal) / 2. Labels
/// are 0 or 1. Throws EvalError unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Min-max onto [0, 1]; a constant sequence maps to all zeros.
std::vector<double> normalize_scores(std::span<const double> scores);

struct VideoLabels {
  std::string video_id;
  std::uint64_t first_frame = 0;  // n - 1
  std::vector<int> labels;        // labels[i] belongs to frame first_frame + i
  std::size_t truncated = 0;      // rows dropped because they precede the first window
};

/// Parses video_id,frame,label rows. Frames before n - 1 are dropped and
/// counted; the remaining frames of each video must be contiguous. Throws
/// EvalError naming the offending video, or on an empty file.
std::vector<VideoLabels> load_labels(const std::filesystem::path& path, std::size_t window);

struct VideoEval {
  std::string video_id;
  std::vector<double> scores;
  std::vector<int> labels;
  std::size_t truncated = 0;
};

/// Pairs score rows with labels video by video. Every scored video needs
/// exactly as many labels as scores, starting at the same frame.
std::vector<VideoEval> align(const std::vector<ScoreRow>& scores,
                             const std::vector<VideoLabels>& labels);

struct EvalReport {
  double dataset_auc = 0.0;
  bool per_video_normalize = false;
  std::size_t frames = 0;
  std::size_t positives = 0;
  std::size_t truncated = 0;
  struct PerVideo {
    std::string video_id;
    std::size_t frames = 0;
    std::size_t positives = 0;
    std::optional<double> auc;  // absent when the video holds a single class
  };
  std::vector<PerVideo> videos;

  std::string to_json() const;
};

/// Dataset AUC over the concatenation of all videos, raw or per-video
/// normalized.
EvalReport evaluate(const std::vector<VideoEval>& videos, bool per_video_normalize);

}  // namespace adjvad
