#include "adjvad/eval.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "adjvad/errors.hpp"

namespace adjvad {

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw EvalError("roc_auc: " + std::to_string(scores.size()) + " scores vs " +
                    std::to_string(labels.size()) + " labels");
  std::size_t pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw EvalError("roc_auc: labels must be 0 or 1");
    pos += static_cast<std::size_t>(l);
  }
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw EvalError("roc_auc needs both positive and negative labels");

  // Average ranks over tie groups, then the rank-sum form of the U statistic.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) rank_sum += avg_rank;
    i = j;
  }
  const double p = static_cast<double>(pos), n = static_cast<double>(neg);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

std::vector<double> normalize_scores(std::span<const double> scores) {
  std::vector<double> out(scores.size(), 0.0);
  if (scores.empty()) return out;
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double range = *hi - *lo;
  if (range > 0.0)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (scores[i] - *lo) / range;
  return out;
}

std::vector<VideoLabels> load_labels(const std::filesystem::path& path, std::size_t window) {
  if (window == 0) throw ConfigError("window must be positive");
  std::ifstream in(path);
  if (!in) throw EvalError("cannot open labels " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw EvalError("labels file " + path.string() + " is empty");
  if (line != "video_id,frame,label")
    throw EvalError(path.string() + ": expected header 'video_id,frame,label'");

  const std::uint64_t first = window - 1;
  std::vector<VideoLabels> out;
  std::map<std::string, std::size_t> index;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id, frame_s, label_s;
    if (!std::getline(ss, id, ',') || !std::getline(ss, frame_s, ',') ||
        !std::getline(ss, label_s) || id.empty())
      throw EvalError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    std::uint64_t frame = 0;
    int label = 0;
    try {
      std::size_t n = 0;
      frame = std::stoull(frame_s, &n);
      if (n != frame_s.size()) throw std::invalid_argument(frame_s);
      label = std::stoi(label_s, &n);
      if (n != label_s.size()) throw std::invalid_argument(label_s);
    } catch (const std::logic_error&) {
      throw EvalError(path.string() + ":" + std::to_string(lineno) + ": bad number");
    }
    if (label != 0 && label != 1)
      throw EvalError(path.string() + ":" + std::to_string(lineno) + ": label must be 0 or 1");

    auto [it, inserted] = index.try_emplace(id, out.size());
    if (inserted) out.push_back({id, first, {}, 0});
    VideoLabels& v = out[it->second];
    if (frame < first) {
      ++v.truncated;
      continue;
    }
    const std::uint64_t expected = first + v.labels.size();
    if (frame != expected)
      throw EvalError("labels for video '" + id + "': expected frame " +
                      std::to_string(expected) + ", got " + std::to_string(frame));
    v.labels.push_back(label);
  }
  if (out.empty()) throw EvalError("labels file " + path.string() + " has no rows");
  return out;
}

std::vector<VideoEval> align(const std::vector<ScoreRow>& scores,
                             const std::vector<VideoLabels>& labels) {
  std::map<std::string, const VideoLabels*> by_id;
  for (const VideoLabels& v : labels) by_id[v.video_id] = &v;

  std::vector<VideoEval> out;
  std::map<std::string, std::size_t> index;
  std::map<std::string, std::uint64_t> first_frame;
  for (const ScoreRow& row : scores) {
    auto [it, inserted] = index.try_emplace(row.video_id, out.size());
    if (inserted) {
      out.push_back({row.video_id, {}, {}, 0});
      first_frame[row.video_id] = row.frame;
    }
    VideoEval& v = out[it->second];
    if (row.frame != first_frame[row.video_id] + v.scores.size())
      throw EvalError("scores for video '" + row.video_id + "' are not contiguous at frame " +
                      std::to_string(row.frame));
    v.scores.push_back(row.mse);
  }
  for (VideoEval& v : out) {
    auto it = by_id.find(v.video_id);
    if (it == by_id.end()) throw EvalError("no labels for video '" + v.video_id + "'");
    const VideoLabels& l = *it->second;
    if (l.first_frame != first_frame[v.video_id] || l.labels.size() != v.scores.size())
      throw EvalError("video '" + v.video_id + "': " + std::to_string(v.scores.size()) +
                      " scores from frame " + std::to_string(first_frame[v.video_id]) + " vs " +
                      std::to_string(l.labels.size()) + " labels from frame " +
                      std::to_string(l.first_frame));
    v.labels = l.labels;
    v.truncated = l.truncated;
  }
  return out;
}

EvalReport evaluate(const std::vector<VideoEval>& videos, bool per_video_normalize) {
  EvalReport rep;
  rep.per_video_normalize = per_video_normalize;
  std::vector<double> all_scores;
  std::vector<int> all_labels;
  for (const VideoEval& v : videos) {
    EvalReport::PerVideo pv{v.video_id, v.scores.size(), 0, std::nullopt};
    for (int l : v.labels) pv.positives += static_cast<std::size_t>(l);
    if (pv.positives > 0 && pv.positives < pv.frames) pv.auc = roc_auc(v.scores, v.labels);
    const std::vector<double> s = per_video_normalize ? normalize_scores(v.scores) : v.scores;
    all_scores.insert(all_scores.end(), s.begin(), s.end());
    all_labels.insert(all_labels.end(), v.labels.begin(), v.labels.end());
    rep.frames += pv.frames;
    rep.positives += pv.positives;
    rep.truncated += v.truncated;
    rep.videos.push_back(std::move(pv));
  }
  rep.dataset_auc = roc_auc(all_scores, all_labels);
  return rep;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["dataset_auc"] = dataset_auc;
  doc["protocol"] = per_video_normalize ? "per_video_normalized" : "raw_concatenated";
  doc["frames"] = frames;
  doc["positives"] = positives;
  doc["truncated_labels"] = truncated;
  doc["videos"] = nlohmann::ordered_json::array();
  for (const PerVideo& v : videos) {
    nlohmann::ordered_json j;
    j["video_id"] = v.video_id;
    j["frames"] = v.frames;
    j["positives"] = v.positives;
    j["auc"] = v.auc ? nlohmann::ordered_json(*v.auc) : nlohmann::ordered_json(nullptr);
    doc["videos"].push_back(std::move(j));
  }
  return doc.dump(2);
}

}  // namespace adjvad
