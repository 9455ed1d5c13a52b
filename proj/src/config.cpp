#include "adjvad/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adjvad/errors.hpp"

namespace adjvad {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json parse_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

std::string slurp(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <typename V>
void read(const json& obj, const char* key, V& out) {
  if (obj.contains(key)) out = obj.at(key).get<V>();
}

const std::set<std::string> kSpecKeys = {
    "height",      "width",          "length",        "background_seed", "normal_actors",
    "speed_min",   "speed_max",      "anomaly_speed", "anomaly_sigma",   "anomaly_amplitude",
    "blob_sigma",  "blob_amplitude", "anomalies",     "noise_sigma",     "seed"};

void read_spec(const json& obj, SynthSpec& spec) {
  read(obj, "height", spec.height);
  read(obj, "width", spec.width);
  read(obj, "length", spec.length);
  read(obj, "background_seed", spec.background_seed);
  read(obj, "normal_actors", spec.normal_actors);
  read(obj, "speed_min", spec.speed_min);
  read(obj, "speed_max", spec.speed_max);
  read(obj, "anomaly_speed", spec.anomaly_speed);
  read(obj, "anomaly_sigma", spec.anomaly_sigma);
  read(obj, "anomaly_amplitude", spec.anomaly_amplitude);
  read(obj, "blob_sigma", spec.blob_sigma);
  read(obj, "blob_amplitude", spec.blob_amplitude);
  read(obj, "noise_sigma", spec.noise_sigma);
  read(obj, "seed", spec.seed);
  if (obj.contains("anomalies")) {
    spec.anomalies.clear();
    for (const json& a : obj.at("anomalies")) {
      check_keys(a, {"start", "end", "kind"}, "anomaly interval");
      AnomalyInterval iv;
      iv.start = a.at("start").get<std::size_t>();
      iv.end = a.at("end").get<std::size_t>();
      if (a.contains("kind")) iv.kind = parse_anomaly_kind(a.at("kind").get<std::string>());
      spec.anomalies.push_back(iv);
    }
  }
}

}  // namespace

ClipCount parse_clip_count(std::string_view name) {
  if (name == "current") return ClipCount::current;
  if (name == "prev" || name == "previous") return ClipCount::previous;
  throw ConfigError("clip_k must be 'current' or 'prev', got '" + std::string(name) + "'");
}

std::string_view to_string(ClipCount c) { return c == ClipCount::current ? "current" : "prev"; }

void DetectConfig::validate() const {
  if (window < 8 || window % 4 != 0)
    throw ConfigError("window must be a multiple of 4 and at least 8, got " +
                      std::to_string(window));
  if (mlp.input_dim != layout().channels())
    throw ConfigError("mlp input_dim does not match the window layout");
  mlp.validate();
  learner.validate();
}

DetectConfig parse_config(const std::string& text) {
  const json doc = parse_text(text, "config");
  check_keys(doc, {"window", "mlp", "learner"}, "config");
  DetectConfig cfg;
  try {
    read(doc, "window", cfg.window);
    if (doc.contains("mlp")) {
      const json& m = doc.at("mlp");
      check_keys(m, {"hidden_layers", "hidden_width", "omega0"}, "config.mlp");
      read(m, "hidden_layers", cfg.mlp.hidden_layers);
      read(m, "hidden_width", cfg.mlp.hidden_width);
      read(m, "omega0", cfg.mlp.omega0);
    }
    if (doc.contains("learner")) {
      const json& l = doc.at("learner");
      check_keys(l,
                 {"eps_bar", "loss_bar", "k_bar_warm", "k_bar", "warm_frames", "lr_first",
                  "lr_rest", "beta1", "beta2", "adam_eps", "clipper", "clip_k"},
                 "config.learner");
      LearnerConfig& c = cfg.learner;
      read(l, "eps_bar", c.eps_bar);
      read(l, "loss_bar", c.loss_bar);
      read(l, "k_bar_warm", c.k_bar_warm);
      read(l, "k_bar", c.k_bar);
      read(l, "warm_frames", c.warm_frames);
      read(l, "lr_first", c.lr_first);
      read(l, "lr_rest", c.lr_rest);
      read(l, "beta1", c.beta1);
      read(l, "beta2", c.beta2);
      read(l, "adam_eps", c.adam_eps);
      read(l, "clipper", c.clipper);
      if (l.contains("clip_k")) c.clip_count = parse_clip_count(l.at("clip_k").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  cfg.mlp.input_dim = cfg.layout().channels();
  cfg.validate();
  return cfg;
}

DetectConfig load_config(const fs::path& path) { return parse_config(slurp(path, "config")); }

std::string to_json(const DetectConfig& cfg) {
  const LearnerConfig& c = cfg.learner;
  json doc = {
      {"window", cfg.window},
      {"mlp",
       {{"hidden_layers", cfg.mlp.hidden_layers},
        {"hidden_width", cfg.mlp.hidden_width},
        {"omega0", cfg.mlp.omega0}}},
      {"learner",
       {{"eps_bar", c.eps_bar},
        {"loss_bar", c.loss_bar},
        {"k_bar_warm", c.k_bar_warm},
        {"k_bar", c.k_bar},
        {"warm_frames", c.warm_frames},
        {"lr_first", c.lr_first},
        {"lr_rest", c.lr_rest},
        {"beta1", c.beta1},
        {"beta2", c.beta2},
        {"adam_eps", c.adam_eps},
        {"clipper", c.clipper},
        {"clip_k", std::string(to_string(c.clip_count))}}}};
  return doc.dump();
}

std::uint64_t config_hash(const DetectConfig& cfg) { return fnv1a64(to_json(cfg)); }

SynthJob parse_synth_job(const std::string& text) {
  const json doc = parse_text(text, "synth spec");
  std::set<std::string> top = kSpecKeys;
  top.insert({"scene_id", "continuous", "videos"});
  check_keys(doc, top, "synth spec");
  SynthJob job;
  try {
    read(doc, "scene_id", job.scene_id);
    read(doc, "continuous", job.continuous);
    SynthSpec defaults;
    read_spec(doc, defaults);
    if (!doc.contains("videos")) {
      job.videos.emplace_back("video_000", defaults);
    } else {
      std::set<std::string> per_video = kSpecKeys;
      per_video.insert("id");
      std::set<std::string> ids;
      for (const json& v : doc.at("videos")) {
        check_keys(v, per_video, "synth video");
        SynthSpec spec = defaults;
        read_spec(v, spec);
        std::string id = v.at("id").get<std::string>();
        if (!ids.insert(id).second) throw ConfigError("duplicate synth video id '" + id + "'");
        job.videos.emplace_back(std::move(id), std::move(spec));
      }
      if (job.videos.empty()) throw ConfigError("synth spec lists no videos");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed synth spec: ") + e.what());
  }
  for (const auto& [id, spec] : job.videos) spec.validate();
  return job;
}

SynthJob load_synth_job(const fs::path& path) { return parse_synth_job(slurp(path, "synth spec")); }

}  // namespace adjvad
