#pragma once

// On-disk artifacts of a detection run.
//
//   <out>/scores.csv          video_id,frame,mse,k_t
//   <out>/learner_log.csv     per-frame learner bookkeeping
//   <out>/run.json            config, config hash, seed, input layout checksum
//   <out>/params/<scene>.bin  final parameter snapshot per scene
//   <out>/maps/<video>/NNNNNN.pgm|.png   with --export-maps

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "adjvad/config.hpp"
#include "adjvad/detector.hpp"
#include "adjvad/ingest.hpp"

namespace adjvad {

/// Values rescaled per map onto [0, 65535]; a constant map becomes all zeros.
RawFrame map_to_pgm16(const Plane& map);

/// 8-bit RGB false-color rendering of the same per-map normalization.
RawFrame map_to_heatmap(const Plane& map);

/// Writes <dir>/<stem>.pgm and <dir>/<stem>.png; returns the PGM path.
std::filesystem::path write_map(const std::filesystem::path& dir, const std::string& stem,
                                const Plane& map);

void write_scores_csv(const std::filesystem::path& path,
                      const std::vector<DetectionRecord>& records);

struct ScoreRow {
  std::string video_id;
  std::uint64_t frame = 0;
  double mse = 0.0;
  int k_t = 0;
  bool operator==(const ScoreRow&) const = default;
};

/// Throws FormatError on a bad header or row.
std::vector<ScoreRow> read_scores_csv(const std::filesystem::path& path);

/// video_id,frame,timestep,frame_in_video,k_t,eps_first,eps_final,loss_first
void write_learner_log(const std::filesystem::path& path,
                       const std::vector<DetectionRecord>& records);

struct RunInfo {
  DetectConfig config;
  std::uint64_t seed = 0;
  std::string manifest_path;
  std::string kernels;
  std::size_t records = 0;
  std::vector<std::string> scenes;
};

void write_run_manifest(const std::filesystem::path& path, const RunInfo& info);

/// Raw little-endian f32 dump of a channel-major stack.
void write_f32(const std::filesystem::path& path, const Stack& stack);

/// Lowercase zero-padded hex, as written into run.json.
std::string hex64(std::uint64_t v);

}  // namespace adjvad
