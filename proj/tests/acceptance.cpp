// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion with
// the measured quantities and wall time, and exits nonzero if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "adjvad/config.hpp"
#include "adjvad/detector.hpp"
#include "adjvad/dwt.hpp"
#include "adjvad/errors.hpp"
#include "adjvad/eval.hpp"
#include "adjvad/grad.hpp"
#include "adjvad/input.hpp"
#include "adjvad/learner.hpp"
#include "adjvad/synth.hpp"

using namespace adjvad;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? NAN : s / static_cast<double>(v.size());
}

SynthSpec base_spec(std::uint64_t seed, std::size_t length = 200) {
  SynthSpec s;
  s.length = length;
  s.seed = seed;
  return s;
}

std::vector<DetectionRecord> detect(const SynthVideo& video, const DetectConfig& cfg,
                                    std::uint64_t seed) {
  SceneDetector det(cfg, seed, false, video.frames.front().values.height,
                    video.frames.front().values.width);
  return det.process_video("video_000", video.frames);
}

double record_auc(const std::vector<DetectionRecord>& recs, const SynthVideo& video) {
  std::vector<double> s;
  std::vector<int> y;
  for (const auto& r : recs) {
    s.push_back(r.detection_mse);
    y.push_back(video.labels[r.frame]);
  }
  return roc_auc(s, y);
}

// ---------------------------------------------------------------- 1: DWT

void analysis_matrix(const WaveletFilter& f, std::size_t m, std::vector<std::vector<double>>& a,
                     std::vector<std::vector<double>>& d) {
  a.assign(m / 2, std::vector<double>(m, 0.0));
  d = a;
  for (std::size_t k = 0; k < m / 2; ++k)
    for (std::size_t j = 0; j < 4; ++j) {
      a[k][(2 * k + j) % m] += f.lowpass[j];
      d[k][(2 * k + j) % m] += f.highpass[j];
    }
}

std::vector<double> mat_vec(const std::vector<std::vector<double>>& mat,
                          const std::vector<double>& x) {
  std::vector<double> y(mat.size(), 0.0);
  for (std::size_t r = 0; r < mat.size(); ++r)
    for (std::size_t c = 0; c < x.size(); ++c) y[r] += mat[r][c] * x[c];
  return y;
}

double sumsq(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

Verdict criterion_dwt() {
  const WaveletFilter f = db2_filter();
  std::vector<std::vector<double>> a16, d16, a8, d8;
  analysis_matrix(f, 16, a16, d16);
  analysis_matrix(f, 8, a8, d8);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-0.5, 0.5);

  const std::size_t trials = 10, h = 3, w = 4;
  double pr = 0, energy = 0, oracle = 0;
  std::size_t signals = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Stack series(16, h, w);
    for (double& v : series.values) v = u(rng);
    const DwtPyramid pyr = analyze(series, f);
    for (std::size_t p = 0; p < h * w; ++p, ++signals) {
      std::vector<double> x(16);
      for (std::size_t c = 0; c < 16; ++c) x[c] = series.values[c * h * w + p];
      auto band = [&](const Stack& s) {
        std::vector<double> out(s.channels);
        for (std::size_t c = 0; c < s.channels; ++c) out[c] = s.values[c * h * w + p];
        return out;
      };
      const auto a1 = band(pyr.a1), b1 = band(pyr.b1), a2 = band(pyr.a2), b2 = band(pyr.b2);

      const auto ra1 = mat_vec(a16, x), rb1 = mat_vec(d16, x);
      const auto ra2 = mat_vec(a8, ra1), rb2 = mat_vec(d8, ra1);
      for (std::size_t i = 0; i < 8; ++i)
        oracle = std::max({oracle, std::abs(a1[i] - ra1[i]), std::abs(b1[i] - rb1[i])});
      for (std::size_t i = 0; i < 4; ++i)
        oracle = std::max({oracle, std::abs(a2[i] - ra2[i]), std::abs(b2[i] - rb2[i])});

      energy = std::max(energy, std::abs(sumsq(x) - sumsq(a1) - sumsq(b1)));
      energy = std::max(energy, std::abs(sumsq(a1) - sumsq(a2) - sumsq(b2)));

      const auto rec1 = inverse_dwt_level(a2, b2, f);
      const auto rec0 = inverse_dwt_level(rec1, b1, f);
      for (std::size_t i = 0; i < 16; ++i) pr = std::max(pr, std::abs(rec0[i] - x[i]));
    }
  }
  const bool ok = signals >= 100 && pr <= 1e-10 && energy <= 1e-10 && oracle <= 1e-10;
  return {ok, fmt("signals=%zu reconstruction=%.2e energy=%.2e matrix_oracle=%.2e (limit 1e-10)",
                  signals, pr, energy, oracle)};
}

// ---------------------------------------------------------- 2: gradients

Verdict criterion_gradients() {
  MlpArchitecture arch;
  arch.hidden_layers = 2;
  arch.hidden_width = 16;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    worst = std::max(worst, gradient_check(arch, 8, 8, seed).max_relative_error);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  InputTensor in;
  in.features = Stack(15, 8, 8);
  for (double& v : in.features.values) v = u(rng);
  Plane target(8, 8);
  for (double& v : target.values) v = u(rng);
  const MlpParams<double> p = init_random<double>(arch, 3);
  const auto probe = backward(p, in, target, 0.0);
  const auto dead = backward(p, in, target, probe.mse + 1e-3);
  const bool zero = dead.loss == 0.0 &&
                    std::all_of(dead.grad.begin(), dead.grad.end(), [](double g) { return g == 0.0; });
  return {worst < 1e-4 && zero,
          fmt("max_rel_error=%.3e over 5 seeds (limit 1e-4), dead_zone_exact_zero=%s", worst,
              zero ? "yes" : "no")};
}

// ---------------------------------------------------------------- 3: Adam

Verdict criterion_adam() {
  const std::size_t dim = 32;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> p(dim);
  for (double& v : p) v = n(rng);
  std::vector<double> q = p, m(dim, 0.0), v2(dim, 0.0);
  AdamState<double> st(dim, 1e-3);
  double worst = 0;
  for (int t = 1; t <= 1000; ++t) {
    std::vector<double> g(dim);
    for (double& x : g) x = n(rng);
    adam_step(std::span<double>(p), std::span<const double>(g), st);
    for (std::size_t i = 0; i < dim; ++i) {
      m[i] = 0.9 * m[i] + 0.1 * g[i];
      v2[i] = 0.999 * v2[i] + 0.001 * g[i] * g[i];
      const double mh = m[i] / (1 - std::pow(0.9, t));
      const double vh = v2[i] / (1 - std::pow(0.999, t));
      q[i] -= 1e-3 * mh / (std::sqrt(vh) + 1e-8);
    }
    for (std::size_t i = 0; i < dim; ++i) worst = std::max(worst, std::abs(p[i] - q[i]));
  }
  return {worst <= 1e-12, fmt("max_abs_diff=%.3e over 1000 steps (limit 1e-12)", worst)};
}

// ------------------------------------------------------------- 4: clipper

Verdict criterion_clipper() {
  MlpArchitecture arch;
  arch.hidden_layers = 2;
  arch.hidden_width = 16;
  const auto a = init_random<float>(arch, 1), b = init_random<float>(arch, 2);
  const auto one = clip(a, b, 1);
  const bool exact = std::equal(one.flat().begin(), one.flat().end(), b.flat().begin());
  const auto mid = clip(a, b, 4);
  double mid_err = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double expect = 0.5 * (static_cast<double>(a.flat()[i]) + b.flat()[i]);
    const double ulp = std::max(std::abs(expect), 1e-30) * std::numeric_limits<float>::epsilon();
    mid_err = std::max(mid_err, std::abs(mid.flat()[i] - expect) / ulp);
  }

  SynthSpec spec;
  spec.height = spec.width = 16;
  spec.length = 20;
  const SynthVideo video = generate(spec);
  LearnerConfig cfg;
  cfg.k_bar_warm = 50;
  cfg.k_bar = 20;
  LearnerState<float> state{init_random<float>(arch, 4)};
  const WaveletFilter f = db2_filter();
  const Stack grid = coord_grid(16, 16);
  bool premap = true;
  std::size_t checked = 0;
  for (std::size_t t = 0; t + 16 <= video.frames.size(); ++t) {
    FrameWindow win;
    for (std::size_t i = t; i < t + 16; ++i)
      win.frames.push_back(std::make_shared<const Frame>(video.frames[i]));
    const InputTensor in = assemble(grid, analyze_window(win, f));
    const Plane& target = win.current().values;
    const auto before = state.theta_init;
    const bool later = state.t > 0;
    const auto out = step(target, in, state, cfg);
    if (later) {
      premap = premap && out.detection_map == error_map(forward(before, in), target);
      ++checked;
    }
  }
  const bool ok = exact && mid_err <= 1.0 && premap && checked > 0;
  return {ok, fmt("k1_exact=%s k4_midpoint_err=%.2f ulp pre_update_map_equal=%s (%zu frames)",
                  exact ? "yes" : "no", mid_err, premap ? "yes" : "no", checked)};
}

// ---------------------------------------------------------- 5: cold start

Verdict criterion_cold_start() {
  const DetectConfig cfg;
  const double limit = cfg.learner.eps_bar + cfg.learner.loss_bar;
  int ok = 0;
  std::string per;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SynthVideo v = generate(base_spec(seed, 16));
    const auto recs = detect(v, cfg, seed);
    const auto& r = recs.at(0);
    const bool hit = r.eps_final <= limit && r.iterations <= cfg.learner.k_bar_warm;
    ok += hit;
    per += fmt(" s%llu:k=%d,eps=%.2e", static_cast<unsigned long long>(seed), r.iterations,
               r.eps_final);
  }
  return {ok >= 4, fmt("%d/5 seeds reach eps<=%.3g within 500 iterations;%s", ok, limit,
                       per.c_str())};
}

// ----------------------------------------------------------- 6: stability

Verdict criterion_stability() {
  const DetectConfig cfg;
  const SynthVideo v = generate(base_spec(1));
  const auto recs = detect(v, cfg, 1);
  std::vector<double> ks, ms;
  for (const auto& r : recs)
    if (r.frame > 20) {
      ks.push_back(r.k_t);
      ms.push_back(r.detection_mse);
    }
  const double mk = median(ks), mm = median(ms);
  return {mk <= 10 && mm <= 5 * cfg.learner.eps_bar,
          fmt("median k_t=%.1f (limit 10), median mse=%.3e (limit %.1e) over %zu frames", mk, mm,
              5 * cfg.learner.eps_bar, ks.size())};
}

// ---------------------------------------------- 7 and 9: fast mover, ablation

struct FastMoverRun {
  SynthVideo video;
  double auc_clip = 0;
  std::vector<double> post_clip;
};

std::vector<double> post_anomaly(const std::vector<DetectionRecord>& recs) {
  std::vector<double> out;
  for (const auto& r : recs)
    if (r.frame >= 121 && r.frame <= 160) out.push_back(r.detection_mse);
  return out;
}

std::vector<FastMoverRun> fast_mover_runs;

Verdict criterion_sensitivity() {
  const DetectConfig cfg;
  int ok = 0;
  std::string per;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthSpec spec = base_spec(seed);
    spec.anomalies = {{80, 121, AnomalyKind::fast_mover}};
    FastMoverRun run;
    run.video = generate(spec);
    const auto recs = detect(run.video, cfg, seed);
    run.auc_clip = record_auc(recs, run.video);
    run.post_clip = post_anomaly(recs);
    ok += run.auc_clip >= 0.9;
    per += fmt(" %.4f", run.auc_clip);
    fast_mover_runs.push_back(std::move(run));
  }
  return {ok >= 4, fmt("%d/5 seeds with AUC>=0.90; AUC per seed:%s", ok, per.c_str())};
}

// Reuses the criterion-7 videos and clipper-enabled results.
Verdict criterion_ablation() {
  if (fast_mover_runs.size() != 5) return {false, "criterion 7 runs unavailable"};
  DetectConfig off;
  off.learner.clipper = false;
  int not_better = 0;
  std::vector<double> all_on, all_off;
  std::string per;
  std::uint64_t seed = 1;
  for (const auto& r : fast_mover_runs) {
    const auto recs = detect(r.video, off, seed++);
    const double auc_off = record_auc(recs, r.video);
    const auto post = post_anomaly(recs);
    not_better += auc_off <= r.auc_clip;
    all_on.insert(all_on.end(), r.post_clip.begin(), r.post_clip.end());
    all_off.insert(all_off.end(), post.begin(), post.end());
    per += fmt(" %.4f/%.4f", r.auc_clip, auc_off);
  }
  const double m_on = mean(all_on), m_off = mean(all_off);
  return {not_better >= 3 && m_off > m_on,
          fmt("no-clip AUC <= clip AUC on %d/5 seeds (clip/no-clip:%s); post-anomaly mean mse "
              "clip=%.3e no-clip=%.3e",
              not_better, per.c_str(), m_on, m_off)};
}

// ------------------------------------------------- 8: unlimited anomalies

Verdict criterion_unlimited() {
  const DetectConfig cfg;
  SynthSpec spec = base_spec(1, 80);
  const SynthVideo normal = generate(spec);
  spec.anomalies = {{0, 80, AnomalyKind::full_anomalous}};
  const SynthVideo anomalous = generate(spec);
  const auto rn = detect(normal, cfg, 1), ra = detect(anomalous, cfg, 1);
  std::vector<double> mn, ma;
  for (std::size_t i = 2; i <= 50; ++i) {
    mn.push_back(rn.at(i).detection_mse);
    ma.push_back(ra.at(i).detection_mse);
  }
  const double ratio = mean(ma) / mean(mn);
  return {ratio >= 2.0,
          fmt("first-fit mse=%.2e; mean mse frames 2-50 anomalous=%.3e normal=%.3e ratio=%.2f "
              "(limit 2)",
              ra.at(0).detection_mse, mean(ma), mean(mn), ratio)};
}

// --------------------------------------------------------- 10: determinism

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ADJVAD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Verdict criterion_determinism() {
  const fs::path dir = fs::path(ADJVAD_TEST_TMP) / "acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "spec.json")
      << R"({"length": 40, "anomalies": [{"start": 25, "end": 35, "kind": "fast_mover"}],
             "videos": [{"id": "a"}, {"id": "b", "seed": 2}]})";
  std::ofstream(dir / "config.json") << "{}";
  if (run_cli("synth --spec " + (dir / "spec.json").string() + " --out " +
              (dir / "data").string()) != 0)
    return {false, "synth failed"};
  const std::string base = "detect --manifest " + (dir / "data" / "manifest.json").string() +
                           " --config " + (dir / "config.json").string() + " --seed 7 --out ";
  const int e1 = run_cli(base + (dir / "run1").string());
  const int e2 = run_cli(base + (dir / "run2").string());
  if (e1 != 0 || e2 != 0) return {false, fmt("detect exit codes %d, %d", e1, e2)};
  const std::string a = slurp(dir / "run1" / "scores.csv"), b = slurp(dir / "run2" / "scores.csv");
  const auto rows = std::count(a.begin(), a.end(), '\n') - 1;
  return {!a.empty() && a == b,
          fmt("scores.csv byte-identical=%s (%zu bytes, %ld rows)", a == b ? "yes" : "no",
              a.size(), static_cast<long>(rows))};
}

// ------------------------------------------------------------ 11: ROC-AUC

double enumerate_auc(const std::vector<double>& s, const std::vector<int>& y) {
  std::vector<double> th(s);
  std::sort(th.begin(), th.end());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  double pos = 0, neg = 0;
  for (int l : y) (l ? pos : neg) += 1;
  double prev_fpr = 0, prev_tpr = 0, area = 0;
  for (auto it = th.rbegin(); it != th.rend(); ++it) {
    double tp = 0, fp = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] >= *it) (y[i] ? tp : fp) += 1;
    const double fpr = fp / neg, tpr = tp / pos;
    area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2;
    prev_fpr = fpr;
    prev_tpr = tpr;
  }
  return area;
}

Verdict criterion_auc() {
  std::mt19937_64 rng(2024);
  double worst = 0;
  std::size_t with_ties = 0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 5 + rng() % 200;
    const int levels = 2 + static_cast<int>(rng() % 30);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = static_cast<double>(rng() % levels) / levels;
      y[i] = static_cast<int>(rng() % 2);
    }
    y[0] = 0;
    y[1] = 1;
    std::vector<double> u(s);
    std::sort(u.begin(), u.end());
    with_ties += std::unique(u.begin(), u.end()) != u.end();
    worst = std::max(worst, std::abs(roc_auc(s, y) - enumerate_auc(s, y)));
  }
  return {worst <= 1e-12,
          fmt("max |rank - enumeration| = %.2e over 100 sets (%zu with ties)", worst, with_ties)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "dwt", criterion_dwt},
      {2, "gradients", criterion_gradients},
      {3, "adam", criterion_adam},
      {4, "clipper", criterion_clipper},
      {5, "cold-start", criterion_cold_start},
      {6, "normal-stability", criterion_stability},
      {7, "anomaly-sensitivity", criterion_sensitivity},
      {8, "unlimited-anomaly", criterion_unlimited},
      {9, "clipper-ablation", criterion_ablation},
      {10, "determinism", criterion_determinism},
      {11, "roc-auc", criterion_auc},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-20s %s  %s  [%.2f s]\n", c.id, c.name, v.pass ? "PASS" : "FAIL",
                v.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !v.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
