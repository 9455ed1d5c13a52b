#pragma once

// Dataset manifest: scenes, each holding an ordered list of videos whose
// frames live in one directory apiece.
//
//   {"scenes": [{"id": "s0", "height": 32, "width": 32, "continuous": false,
//                "videos": [{"id": "v0", "frames": "frames/v0"}]}]}
//
// Relative frame directories resolve against the manifest's own directory.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace adjvad {

struct VideoEntry {
  std::string id;
  std::filesystem::path frames_dir;
};

struct SceneEntry {
  std::string id;
  std::size_t height = 0;
  std::size_t width = 0;
  bool continuous = false;
  std::vector<VideoEntry> videos;
};

struct Manifest {
  std::vector<SceneEntry> scenes;
};

/// Throws ConfigError on malformed JSON, missing keys, duplicate ids, an
/// empty scene, or a target side below 16. Frame directories come back
/// absolute.
Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir);

void save_manifest(const std::filesystem::path& path, const Manifest& manifest);

}  // namespace adjvad
