#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include <json.hpp>

#include "adjvad/errors.hpp"
#include "adjvad/eval.hpp"
#include "test_support.hpp"

using namespace adjvad;

namespace {

// Area under the empirical ROC curve swept over every distinct threshold,
// trapezoidal between operating points.
double threshold_sweep_auc(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<double> th(s);
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  const double pos = std::count(y.begin(), y.end(), 1), neg = y.size() - pos;
  std::vector<std::pair<double, double>> pts = {{0, 0}};
  for (auto it = th.rbegin(); it != th.rend(); ++it) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] >= *it) (y[i] ? tp : fp) += 1;
    pts.push_back({fp / neg, tp / pos});
  }
  double area = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    area += (pts[i].first - pts[i - 1].first) * (pts[i].second + pts[i - 1].second) / 2;
  return area;
}

std::filesystem::path write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

std::string labels_csv(const std::string& id, std::size_t from, std::size_t to,
                       std::size_t pos_from = 1000) {
  std::string s;
  for (std::size_t f = from; f < to; ++f)
    s += id + "," + std::to_string(f) + "," + (f >= pos_from ? "1" : "0") + "\n";
  return s;
}

}  // namespace

TEST(RocAuc, Examples) {
  const std::vector<int> y = {0, 0, 0, 1, 1, 1};
  EXPECT_EQ(roc_auc(std::vector<double>{1, 2, 3, 4, 5, 6}, y), 1.0);
  EXPECT_EQ(roc_auc(std::vector<double>{6, 5, 4, 3, 2, 1}, y), 0.0);
  EXPECT_EQ(roc_auc(std::vector<double>(6, 0.3), y), 0.5);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8, 0.3, 0.38}, y), 6.0 / 9.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.1, 0.5, 0.2, 0.5, 0.9, 0.3}, y), 7.5 / 9.0);
}

TEST(RocAuc, MatchesThresholdSweepWithTies) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % 7);
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    EXPECT_NEAR(roc_auc(s, y), threshold_sweep_auc(s, y), 1e-12) << trial;
  }
}

TEST(RocAuc, InvariantToMonotoneMapsAndComplementary) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> s(100), t(100), neg(100);
  std::vector<int> y(100);
  for (int i = 0; i < 100; ++i) {
    y[i] = i % 3 == 0;
    s[i] = g(rng) + y[i];
    t[i] = std::exp(3 * s[i]) + 7;
    neg[i] = -s[i];
  }
  EXPECT_DOUBLE_EQ(roc_auc(s, y), roc_auc(t, y));
  EXPECT_NEAR(roc_auc(s, y) + roc_auc(neg, y), 1.0, 1e-12);
}

TEST(RocAuc, Errors) {
  EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), EvalError);
  EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, std::vector<int>{0, 0}), EvalError);
  EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, std::vector<int>{0}), EvalError);
  EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, std::vector<int>{0, 2}), EvalError);
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_scores(std::vector<double>{2, 4, 3}), (std::vector<double>{0, 1, 0.5}));
  EXPECT_EQ(normalize_scores(std::vector<double>{5, 5}), (std::vector<double>{0, 0}));
  EXPECT_TRUE(normalize_scores(std::vector<double>{}).empty());
}

TEST(Labels, TruncationAndContiguity) {
  const auto dir = adjvad::testing::scratch_dir();
  const auto a = load_labels(
      write_text(dir / "a.csv", "video_id,frame,label\n" + labels_csv("v", 15, 100, 50)), 16);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].labels.size(), 85u);
  EXPECT_EQ(a[0].first_frame, 15u);
  EXPECT_EQ(a[0].truncated, 0u);
  EXPECT_EQ(a[0].labels[50 - 15], 1);
  EXPECT_EQ(a[0].labels[50 - 16], 0);

  const auto b = load_labels(write_text(dir / "b.csv", "video_id,frame,label\n" +
                                                           labels_csv("v", 0, 100) +
                                                           labels_csv("w", 0, 20)),
                             16);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].truncated, 15u);
  EXPECT_EQ(b[0].labels.size(), 85u);
  EXPECT_EQ(b[1].video_id, "w");
  EXPECT_EQ(b[1].labels.size(), 5u);
}

TEST(Labels, Errors) {
  const auto dir = adjvad::testing::scratch_dir();
  EXPECT_THROW(load_labels(write_text(dir / "e.csv", ""), 16), EvalError);
  EXPECT_THROW(load_labels(write_text(dir / "h.csv", "vid,frame,label\nv,15,0\n"), 16), EvalError);
  EXPECT_THROW(load_labels(write_text(dir / "r.csv", "video_id,frame,label\nv,15,x\n"), 16),
               EvalError);
  try {
    load_labels(write_text(dir / "g.csv", "video_id,frame,label\nv,15,0\nv,17,0\n"), 16);
    FAIL();
  } catch (const EvalError& e) {
    EXPECT_NE(std::string(e.what()).find("'v'"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_labels(dir / "missing.csv", 16), DataError);
}

TEST(Align, PairsAndReportsMismatches) {
  VideoLabels l{"v", 15, {0, 0, 1}, 15};
  const std::vector<ScoreRow> rows = {{"v", 15, 0.1, 1}, {"v", 16, 0.2, 1}, {"v", 17, 0.9, 1}};
  const auto ev = align(rows, {l});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].scores, (std::vector<double>{0.1, 0.2, 0.9}));
  EXPECT_EQ(ev[0].labels, l.labels);
  EXPECT_EQ(ev[0].truncated, 15u);

  auto expect_named = [](const std::vector<ScoreRow>& r, const std::vector<VideoLabels>& ls,
                         const std::string& name) {
    try {
      align(r, ls);
      FAIL() << "accepted";
    } catch (const EvalError& e) {
      EXPECT_NE(std::string(e.what()).find(name), std::string::npos) << e.what();
    }
  };
  expect_named({{"x", 15, 0.1, 1}}, {l}, "x");
  expect_named({rows[0], rows[1]}, {l}, "v");
  expect_named({rows[0], rows[2]}, {l}, "v");
  expect_named({{"v", 16, 0.1, 1}, {"v", 17, 0.1, 1}, {"v", 18, 0.1, 1}}, {l}, "v");
}

TEST(Evaluate, RawAndNormalizedProtocols) {
  const std::vector<VideoEval> videos = {{"a", {10.0, 20.0, 30.0}, {0, 0, 1}, 0},
                                         {"b", {1.0, 2.0, 3.0}, {0, 1, 1}, 15},
                                         {"c", {5.0, 6.0}, {0, 0}, 0}};
  const EvalReport raw = evaluate(videos, false);
  EXPECT_EQ(raw.frames, 8u);
  EXPECT_EQ(raw.positives, 3u);
  EXPECT_EQ(raw.truncated, 15u);
  std::vector<double> all = {10.0, 20.0, 30.0, 1.0, 2.0, 3.0, 5.0, 6.0};
  std::vector<int> y = {0, 0, 1, 0, 1, 1, 0, 0};
  EXPECT_DOUBLE_EQ(raw.dataset_auc, roc_auc(all, y));
  ASSERT_EQ(raw.videos.size(), 3u);
  EXPECT_EQ(raw.videos[0].auc, 1.0);
  EXPECT_FALSE(raw.videos[2].auc.has_value());

  const EvalReport norm = evaluate(videos, true);
  std::vector<double> n = {0, 0.5, 1, 0, 0.5, 1, 0, 1};
  EXPECT_DOUBLE_EQ(norm.dataset_auc, roc_auc(n, y));
  EXPECT_DOUBLE_EQ(norm.dataset_auc, 12.5 / 15.0);
  EXPECT_NE(raw.dataset_auc, norm.dataset_auc);

  const auto j = nlohmann::json::parse(norm.to_json());
  EXPECT_EQ(j.at("protocol"), "per_video_normalized");
  EXPECT_EQ(nlohmann::json::parse(raw.to_json()).at("protocol"), "raw_concatenated");
  EXPECT_DOUBLE_EQ(j.at("dataset_auc").get<double>(), norm.dataset_auc);
}
