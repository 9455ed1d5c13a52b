// Command-line front end: detect, synth, eval, gradcheck.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "adjvad/config.hpp"
#include "adjvad/detector.hpp"
#include "adjvad/errors.hpp"
#include "adjvad/eval.hpp"
#include "adjvad/grad.hpp"
#include "adjvad/kernels.hpp"
#include "adjvad/manifest.hpp"
#include "adjvad/outputs.hpp"
#include "adjvad/synth.hpp"

namespace fs = std::filesystem;
using namespace adjvad;

namespace {

enum Exit { kOk = 0, kConfig = 1, kData = 2, kNumeric = 3 };

struct DetectArgs {
  std::string manifest, config, out, clip_k, dump_dwt;
  std::uint64_t seed = 0;
  bool export_maps = false;
};

std::string frame_stem(std::uint64_t frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(frame));
  return buf;
}

int run_detect(const DetectArgs& a) {
  DetectConfig cfg = load_config(a.config);
  if (!a.clip_k.empty()) cfg.learner.clip_count = parse_clip_count(a.clip_k);
  const Manifest manifest = load_manifest(a.manifest);

  std::set<std::string> ids;
  for (const SceneEntry& s : manifest.scenes)
    for (const VideoEntry& v : s.videos)
      if (!ids.insert(v.id).second)
        throw ConfigError("video id '" + v.id + "' appears in more than one scene");

  const fs::path out = a.out;
  std::error_code ec;
  fs::create_directories(out / "params", ec);
  if (ec) throw IoError("cannot create " + (out / "params").string() + ": " + ec.message());
  std::vector<DetectionRecord> all;
  RunInfo info{cfg, a.seed, fs::absolute(a.manifest).string(),
               std::string(kernels::active().name), 0, {}};
  for (const SceneEntry& scene : manifest.scenes) {
    FrameObserver observer;
    if (a.export_maps || !a.dump_dwt.empty()) {
      observer = [&](DetectionRecord& rec, const Plane& map, const DwtPyramid& pyr) {
        const std::string stem = frame_stem(rec.frame);
        if (a.export_maps) rec.map_path = write_map(out / "maps" / rec.video_id, stem, map);
        if (!a.dump_dwt.empty()) {
          const fs::path dir = fs::path(a.dump_dwt) / rec.video_id;
          write_f32(dir / (stem + "_a1.f32"), pyr.a1);
          write_f32(dir / (stem + "_b1.f32"), pyr.b1);
          write_f32(dir / (stem + "_a2.f32"), pyr.a2);
          write_f32(dir / (stem + "_b2.f32"), pyr.b2);
        }
      };
    }
    MlpParams<float> final_params;
    auto records = run_scene(scene, cfg, a.seed, observer, &final_params);
    save_params(out / "params" / (scene.id + ".bin"), final_params);
    std::cerr << "scene " << scene.id << ": " << records.size() << " analyzed frames\n";
    all.insert(all.end(), std::make_move_iterator(records.begin()),
               std::make_move_iterator(records.end()));
    info.scenes.push_back(scene.id);
  }
  info.records = all.size();
  write_scores_csv(out / "scores.csv", all);
  write_learner_log(out / "learner_log.csv", all);
  write_run_manifest(out / "run.json", info);
  return kOk;
}

int run_synth(const std::string& spec_path, const std::string& out) {
  const SynthJob job = load_synth_job(spec_path);
  std::vector<SynthDatasetVideo> videos;
  for (const auto& [id, spec] : job.videos) {
    if (spec.height != job.videos.front().second.height ||
        spec.width != job.videos.front().second.width)
      throw ConfigError("all synthetic videos of a scene must share one resolution");
    videos.push_back({id, generate(spec, id, job.scene_id)});
    std::cerr << id << ": " << spec.length << " frames, motion normal "
              << videos.back().video.normal_motion << " anomalous "
              << videos.back().video.anomalous_motion << '\n';
  }
  write_dataset(videos, out, job.scene_id, job.continuous);
  return kOk;
}

int run_eval(const std::string& scores, const std::string& labels, bool normalize,
             std::size_t window, const std::string& report_path) {
  const auto aligned = align(read_scores_csv(scores), load_labels(labels, window));
  const EvalReport rep = evaluate(aligned, normalize);
  std::printf("%.6f\n", rep.dataset_auc);
  const fs::path report =
      report_path.empty() ? fs::path(scores).parent_path() / "eval.json" : fs::path(report_path);
  std::ofstream out(report);
  if (!out) throw IoError("cannot write " + report.string());
  out << rep.to_json() << '\n';
  if (rep.truncated > 0)
    std::cerr << "warning: " << rep.truncated
              << " label rows precede the first analyzed frame and were ignored\n";
  return kOk;
}

int run_gradcheck(std::size_t layers, std::size_t width, std::size_t side, int seeds,
                  double tol) {
  MlpArchitecture arch;
  arch.hidden_layers = layers;
  arch.hidden_width = width;
  double worst = 0.0;
  for (int s = 1; s <= seeds; ++s) {
    const GradCheckResult r = gradient_check(arch, side, side, static_cast<std::uint64_t>(s));
    std::printf("seed %d: %zu parameters, max relative error %.3e\n", s, r.parameters_checked,
                r.max_relative_error);
    worst = std::max(worst, r.max_relative_error);
  }
  const bool ok = worst < tol;
  std::printf("%s (worst %.3e, tolerance %.1e)\n", ok ? "ok" : "FAILED", worst, tol);
  return ok ? kOk : kNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online video anomaly detection with an incrementally trained pixel MLP"};
  app.require_subcommand(1);
  std::string backend = "auto";
  app.add_option("--kernels", backend, "Kernel backend: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  DetectArgs d;
  auto* detect = app.add_subcommand("detect", "Score every analyzed frame of a dataset");
  detect->add_option("--manifest", d.manifest, "Dataset manifest (JSON)")->required();
  detect->add_option("--config", d.config, "Detection config (JSON)")->required();
  detect->add_option("--seed", d.seed, "Initialization seed")->required();
  detect->add_option("--out", d.out, "Output directory")->required();
  detect->add_flag("--export-maps", d.export_maps, "Write per-frame PGM and PNG maps");
  detect->add_option("--clip-k", d.clip_k, "Clipper iteration count: current or prev")
      ->check(CLI::IsMember({"current", "prev"}));
  detect->add_option("--dump-dwt", d.dump_dwt,
                     "Write per-frame wavelet bands as raw f32 files under this directory");

  std::string spec, synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  synth->add_option("--spec", spec, "Synth spec (JSON)")->required();
  synth->add_option("--out", synth_out, "Output directory")->required();

  std::string scores, labels, report;
  bool normalize = false;
  std::size_t window = kDefaultWindow;
  auto* eval = app.add_subcommand("eval", "Frame-level ROC-AUC of a scores CSV");
  eval->add_option("--scores", scores, "scores.csv from detect")->required();
  eval->add_option("--labels", labels, "labels CSV (video_id,frame,label)")->required();
  eval->add_flag("--per-video-normalize", normalize, "Min-max scores per video first");
  eval->add_option("--window", window, "Window length used by detect")->capture_default_str();
  eval->add_option("--report", report, "JSON report path (default: next to the scores)");

  std::size_t gc_layers = 2, gc_width = 16, gc_side = 8;
  int gc_seeds = 5;
  double gc_tol = 1e-4;
  auto* gc = app.add_subcommand("gradcheck", "Backward pass vs central differences (f64)");
  gc->add_option("--layers", gc_layers, "Hidden layers")->capture_default_str();
  gc->add_option("--width", gc_width, "Hidden width")->capture_default_str();
  gc->add_option("--size", gc_side, "Frame side")->capture_default_str();
  gc->add_option("--seeds", gc_seeds, "Seeds 1..N to check")->capture_default_str();
  gc->add_option("--tolerance", gc_tol, "Max relative error")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (backend != "auto") {
      const auto be = kernels::parse_backend(backend);
      if (!kernels::backend_available(be))
        throw ConfigError("kernel backend '" + backend + "' is not supported on this CPU");
      kernels::select_backend(be);
    }
    if (*detect) return run_detect(d);
    if (*synth) return run_synth(spec, synth_out);
    if (*eval) return run_eval(scores, labels, normalize, window, report);
    if (*gc) return run_gradcheck(gc_layers, gc_width, gc_side, gc_seeds, gc_tol);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const ShapeError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
