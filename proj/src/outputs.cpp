#include "adjvad/outputs.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adjvad/errors.hpp"

namespace adjvad {

namespace fs = std::filesystem;

namespace {

// Per-map min-max onto [0, 1]; degenerate range maps to 0.
std::vector<double> normalized(const Plane& map) {
  std::vector<double> out(map.size(), 0.0);
  if (map.values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (map.values[i] - *lo) / range;
  return out;
}

std::array<std::uint8_t, 3> colormap(double x) {
  // Piecewise-linear ramp black -> blue -> cyan -> yellow -> red.
  static constexpr double stops[5][3] = {
      {0, 0, 0}, {0, 0, 1}, {0, 1, 1}, {1, 1, 0}, {1, 0, 0}};
  x = std::clamp(x, 0.0, 1.0) * 4.0;
  const int i = std::min(static_cast<int>(x), 3);
  const double f = x - i;
  std::array<std::uint8_t, 3> rgb{};
  for (int c = 0; c < 3; ++c)
    rgb[c] = static_cast<std::uint8_t>(
        std::lround(255.0 * (stops[i][c] + f * (stops[i + 1][c] - stops[i][c]))));
  return rgb;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

RawFrame map_to_pgm16(const Plane& map) {
  RawFrame raw{map.width, map.height, 1, 16, {}};
  for (double v : normalized(map))
    raw.pixels.push_back(static_cast<std::uint16_t>(std::lround(v * 65535.0)));
  return raw;
}

RawFrame map_to_heatmap(const Plane& map) {
  RawFrame raw{map.width, map.height, 3, 8, {}};
  raw.pixels.reserve(map.size() * 3);
  for (double v : normalized(map))
    for (std::uint8_t c : colormap(v)) raw.pixels.push_back(c);
  return raw;
}

fs::path write_map(const fs::path& dir, const std::string& stem, const Plane& map) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const fs::path pgm = dir / (stem + ".pgm");
  write_pgm(pgm, map_to_pgm16(map));
  write_png(dir / (stem + ".png"), map_to_heatmap(map));
  return pgm;
}

void write_scores_csv(const fs::path& path, const std::vector<DetectionRecord>& records) {
  std::ofstream out = open_out(path);
  out << "video_id,frame,mse,k_t\n";
  for (const DetectionRecord& r : records)
    out << r.video_id << ',' << r.frame << ',' << fmt(r.detection_mse) << ',' << r.k_t << '\n';
  finish(out, path);
}

std::vector<ScoreRow> read_scores_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scores " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "video_id,frame,mse,k_t")
    throw FormatError(path.string() + ": expected header 'video_id,frame,mse,k_t'");
  std::vector<ScoreRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id, frame, mse, k;
    if (!std::getline(ss, id, ',') || !std::getline(ss, frame, ',') ||
        !std::getline(ss, mse, ',') || !std::getline(ss, k) || id.empty())
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    ScoreRow row;
    row.video_id = id;
    try {
      std::size_t pos = 0;
      row.frame = std::stoull(frame, &pos);
      if (pos != frame.size()) throw std::invalid_argument(frame);
      row.mse = std::stod(mse, &pos);
      if (pos != mse.size()) throw std::invalid_argument(mse);
      row.k_t = std::stoi(k, &pos);
      if (pos != k.size()) throw std::invalid_argument(k);
    } catch (const std::logic_error&) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad number");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_learner_log(const fs::path& path, const std::vector<DetectionRecord>& records) {
  std::ofstream out = open_out(path);
  out << "video_id,frame,timestep,frame_in_video,k_t,eps_first,eps_final,loss_first\n";
  for (const DetectionRecord& r : records)
    out << r.video_id << ',' << r.frame << ',' << r.learner_t << ',' << r.frame_in_video << ','
        << r.k_t << ',' << fmt(r.eps_first) << ',' << fmt(r.eps_final) << ','
        << fmt(r.loss_first) << '\n';
  finish(out, path);
}

void write_run_manifest(const fs::path& path, const RunInfo& info) {
  const InputLayout layout = info.config.layout();
  nlohmann::ordered_json doc;
  doc["seed"] = info.seed;
  doc["config_hash"] = hex64(config_hash(info.config));
  doc["config"] = nlohmann::json::parse(to_json(info.config));
  doc["input_layout"] = layout.describe();
  doc["layout_checksum"] = hex64(layout.checksum());
  doc["manifest"] = info.manifest_path;
  doc["kernels"] = info.kernels;
  doc["scenes"] = info.scenes;
  doc["records"] = info.records;
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

void write_f32(const fs::path& path, const Stack& stack) {
  std::ofstream out = open_out(path);
  std::vector<char> bytes(stack.values.size() * 4);
  for (std::size_t i = 0; i < stack.values.size(); ++i) {
    std::uint32_t u = std::bit_cast<std::uint32_t>(static_cast<float>(stack.values[i]));
    for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<char>((u >> (8 * b)) & 0xff);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  finish(out, path);
}

}  // namespace adjvad
