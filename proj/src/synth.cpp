#include "adjvad/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>

#include "adjvad/errors.hpp"
#include "adjvad/manifest.hpp"

namespace adjvad {

namespace fs = std::filesystem;

AnomalyKind parse_anomaly_kind(std::string_view name) {
  if (name == "fast_mover") return AnomalyKind::fast_mover;
  if (name == "appear_disappear") return AnomalyKind::appear_disappear;
  if (name == "full_anomalous") return AnomalyKind::full_anomalous;
  throw ConfigError("unknown anomaly kind: " + std::string(name));
}

std::string_view to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::fast_mover: return "fast_mover";
    case AnomalyKind::appear_disappear: return "appear_disappear";
    case AnomalyKind::full_anomalous: return "full_anomalous";
  }
  return "unknown";
}

void SynthSpec::validate() const {
  if (height < kMinFrameSide || width < kMinFrameSide)
    throw ConfigError("synthetic frames must be at least 16x16");
  if (length == 0) throw ConfigError("synthetic video length must be positive");
  if (!(speed_min > 0.0) || speed_max < speed_min)
    throw ConfigError("normal speeds must satisfy 0 < speed_min <= speed_max");
  if (effective_anomaly_speed() < 3.0 * speed_max)
    throw ConfigError("anomaly speed must be at least 3x the fastest normal speed");
  if (!(blob_sigma > 0.0)) throw ConfigError("blob_sigma must be positive");
  if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  for (const auto& a : anomalies)
    if (a.start >= a.end || a.end > length)
      throw ConfigError("anomaly interval [" + std::to_string(a.start) + ", " +
                        std::to_string(a.end) + ") lies outside [0, " +
                        std::to_string(length) + ")");
}

namespace {

struct Actor {
  double r = 0, c = 0, vr = 0, vc = 0;

  void advance(double h, double w) {
    r += vr;
    c += vc;
    if (r < 0) { r = -r; vr = -vr; }
    if (r > h - 1) { r = 2 * (h - 1) - r; vr = -vr; }
    if (c < 0) { c = -c; vc = -vc; }
    if (c > w - 1) { c = 2 * (w - 1) - c; vc = -vc; }
  }
};

Actor spawn(std::mt19937_64& rng, double h, double w, double speed) {
  std::uniform_real_distribution<double> ur(0.0, h - 1), uc(0.0, w - 1);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  const double a = ang(rng);
  return {ur(rng), uc(rng), speed * std::sin(a), speed * std::cos(a)};
}

void splat(Plane& p, const Actor& a, double sigma, double amplitude) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t r = 0; r < p.height; ++r)
    for (std::size_t c = 0; c < p.width; ++c) {
      const double dr = static_cast<double>(r) - a.r, dc = static_cast<double>(c) - a.c;
      p.at(r, c) += amplitude * std::exp(-(dr * dr + dc * dc) * inv);
    }
}

Plane background(const SynthSpec& spec) {
  std::mt19937_64 rng(spec.background_seed);
  std::uniform_real_distribution<double> amp(0.04, 0.08), freq(0.3, 1.5),
      phase(0.0, 2.0 * std::numbers::pi);
  struct Wave { double a, fr, fc, ph; };
  std::vector<Wave> waves;
  for (int i = 0; i < 3; ++i) waves.push_back({amp(rng), freq(rng), freq(rng), phase(rng)});
  Plane p(spec.height, spec.width);
  for (std::size_t r = 0; r < spec.height; ++r)
    for (std::size_t c = 0; c < spec.width; ++c) {
      double v = -0.15;
      for (const Wave& wv : waves)
        v += wv.a * std::sin(2.0 * std::numbers::pi *
                                 (wv.fr * static_cast<double>(r) / spec.height +
                                  wv.fc * static_cast<double>(c) / spec.width) +
                             wv.ph);
      p.at(r, c) = v;
    }
  return p;
}

}  // namespace

SynthVideo generate(const SynthSpec& spec, const std::string& video_id,
                    const std::string& scene_id) {
  spec.validate();
  const double h = static_cast<double>(spec.height), w = static_cast<double>(spec.width);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> speed(spec.speed_min, spec.speed_max);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0 ? spec.noise_sigma : 1.0);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);

  const Plane base = background(spec);
  std::vector<Actor> normals;
  for (std::size_t i = 0; i < spec.normal_actors; ++i) normals.push_back(spawn(rng, h, w, speed(rng)));

  // One anomalous actor per interval, spawned when the interval opens.
  std::vector<Actor> anomalous(spec.anomalies.size());
  const double fast = spec.effective_anomaly_speed();
  const double asig = spec.effective_anomaly_sigma();
  const double aamp = spec.effective_anomaly_amplitude();

  SynthVideo out;
  out.labels.assign(spec.length, 0);
  for (std::size_t t = 0; t < spec.length; ++t) {
    Plane p = base;
    for (const Actor& a : normals) splat(p, a, spec.blob_sigma, spec.blob_amplitude);

    for (std::size_t i = 0; i < spec.anomalies.size(); ++i) {
      const AnomalyInterval& iv = spec.anomalies[i];
      if (t < iv.start || t >= iv.end) continue;
      out.labels[t] = 1;
      Actor& a = anomalous[i];
      if (t == iv.start) a = spawn(rng, h, w, fast);
      switch (iv.kind) {
        case AnomalyKind::fast_mover:
          if (t != iv.start) a.advance(h, w);
          splat(p, a, asig, aamp);
          break;
        case AnomalyKind::full_anomalous: {
          // Erratic fast motion: a fresh heading every frame.
          if (t != iv.start) {
            const double th = ang(rng);
            a.vr = fast * std::sin(th);
            a.vc = fast * std::cos(th);
            a.advance(h, w);
          }
          splat(p, a, asig, aamp);
          break;
        }
        case AnomalyKind::appear_disappear:
          // Visible for two frames, hidden for two, relocating on each appearance.
          if ((t - iv.start) % 4 == 0 && t != iv.start) a = spawn(rng, h, w, fast);
          if ((t - iv.start) % 4 < 2) splat(p, a, asig, aamp);
          break;
      }
    }

    if (spec.noise_sigma > 0)
      for (double& v : p.values) v += noise(rng);
    for (double& v : p.values) v = std::clamp(v, -0.5, 0.5);

    Frame f;
    f.values = std::move(p);
    f.video_id = video_id;
    f.scene_id = scene_id;
    f.timestep = t;
    out.frames.push_back(std::move(f));

    for (Actor& a : normals) a.advance(h, w);
  }

  double sum_n = 0, sum_a = 0;
  std::size_t cnt_n = 0, cnt_a = 0;
  for (std::size_t t = 1; t < spec.length; ++t) {
    double d = 0;
    const auto& x = out.frames[t].values.values;
    const auto& y = out.frames[t - 1].values.values;
    for (std::size_t i = 0; i < x.size(); ++i) d += std::abs(x[i] - y[i]);
    d /= static_cast<double>(x.size());
    if (out.labels[t]) { sum_a += d; ++cnt_a; } else { sum_n += d; ++cnt_n; }
  }
  out.normal_motion = cnt_n ? sum_n / cnt_n : 0.0;
  out.anomalous_motion = cnt_a ? sum_a / cnt_a : 0.0;
  if (cnt_n && cnt_a && out.anomalous_motion < 2.0 * out.normal_motion)
    throw ConfigError("synthetic anomaly is not drastic enough: mean inter-frame change " +
                      std::to_string(out.anomalous_motion) + " vs normal " +
                      std::to_string(out.normal_motion));
  return out;
}

void write_dataset(const std::vector<SynthDatasetVideo>& videos, const fs::path& out_dir,
                   const std::string& scene_id, bool continuous) {
  if (videos.empty()) throw ConfigError("write_dataset needs at least one video");
  std::error_code ec;
  fs::create_directories(out_dir / "frames", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "frames").string() + ": " + ec.message());

  SceneEntry scene;
  scene.id = scene_id;
  scene.continuous = continuous;
  scene.height = videos.front().video.frames.front().values.height;
  scene.width = videos.front().video.frames.front().values.width;

  const fs::path labels_path = out_dir / "labels.csv";
  std::ofstream labels(labels_path);
  if (!labels) throw IoError("cannot write " + labels_path.string());
  labels << "video_id,frame,label\n";

  for (const auto& v : videos) {
    const fs::path dir = out_dir / "frames" / v.id;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (std::size_t t = 0; t < v.video.frames.size(); ++t) {
      std::ostringstream name;
      name << std::setw(6) << std::setfill('0') << t << ".pgm";
      write_pgm(dir / name.str(), quantize(v.video.frames[t].values, 8));
      labels << v.id << ',' << t << ',' << v.video.labels[t] << '\n';
    }
    scene.videos.push_back({v.id, fs::path("frames") / v.id});
  }
  if (!labels) throw IoError("error writing " + labels_path.string());

  Manifest m;
  m.scenes.push_back(std::move(scene));
  save_manifest(out_dir / "manifest.json", m);
}

}  // namespace adjvad
