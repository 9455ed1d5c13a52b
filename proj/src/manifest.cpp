#include "adjvad/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adjvad/errors.hpp"
#include "adjvad/ingest.hpp"

namespace adjvad {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || key == k;
    if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

Manifest parse_manifest(const std::string& text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  require_keys(doc, {"scenes"}, "manifest");
  if (!doc.contains("scenes") || !doc["scenes"].is_array() || doc["scenes"].empty())
    throw ConfigError("manifest needs a non-empty 'scenes' array");

  Manifest m;
  std::set<std::string> scene_ids;
  try {
    for (const json& s : doc["scenes"]) {
      require_keys(s, {"id", "height", "width", "continuous", "videos"}, "scene");
      SceneEntry scene;
      scene.id = s.at("id").get<std::string>();
      const std::string where = "scene '" + scene.id + "'";
      if (!scene_ids.insert(scene.id).second) throw ConfigError("duplicate " + where);
      scene.height = s.at("height").get<std::size_t>();
      scene.width = s.at("width").get<std::size_t>();
      if (scene.height < kMinFrameSide || scene.width < kMinFrameSide)
        throw ConfigError(where + ": target resolution must be at least 16x16");
      scene.continuous = s.value("continuous", false);
      const json& videos = s.at("videos");
      if (!videos.is_array() || videos.empty())
        throw ConfigError(where + " has no videos");
      std::set<std::string> video_ids;
      for (const json& v : videos) {
        require_keys(v, {"id", "frames"}, where + " video");
        VideoEntry entry;
        entry.id = v.at("id").get<std::string>();
        if (!video_ids.insert(entry.id).second)
          throw ConfigError(where + ": duplicate video '" + entry.id + "'");
        fs::path dir = v.at("frames").get<std::string>();
        entry.frames_dir = dir.is_absolute() ? dir : base_dir / dir;
        scene.videos.push_back(std::move(entry));
      }
      m.scenes.push_back(std::move(scene));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_manifest(text.str(), fs::absolute(path).parent_path());
}

void save_manifest(const fs::path& path, const Manifest& manifest) {
  json doc;
  doc["scenes"] = json::array();
  for (const SceneEntry& s : manifest.scenes) {
    json videos = json::array();
    for (const VideoEntry& v : s.videos)
      videos.push_back({{"id", v.id}, {"frames", v.frames_dir.generic_string()}});
    doc["scenes"].push_back({{"id", s.id},
                             {"height", s.height},
                             {"width", s.width},
                             {"continuous", s.continuous},
                             {"videos", std::move(videos)}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace adjvad
