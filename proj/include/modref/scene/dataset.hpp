#pragma once

#include <filesystem>

#include "modref/scene/render.hpp"
#include "modref/scene/types.hpp"

namespace modref::scene {

enum class LightingMode {
  kAll,    // every preset for every scene
  kCycle,  // preset i % presets for scene i
};

struct GenConfig {
  int scenes = 10;
  int frames = 20;
  int width = 64;
  int height = 64;
  uint64_t seed = 1234;
  LightingMode lighting_mode = LightingMode::kAll;
  std::vector<std::string> presets;  // empty = all five
  double camera_step_frac = 0.006;
  SceneParams params;
};

GenConfig load_gen_config(const std::filesystem::path& path);

/// Directory layout under out_dir:
///   manifest.json
///   scene_<id>/<preset>/{rgb,depth,normal,label,flow,occl}/frame_%05d.<ext>
/// rgb: .ppm, depth/normal: .pfm, label/occl: .pgm, flow: .flo. The last
/// frame of each sequence has no flow/occl file. Bit-identical for identical
/// (config, seed).
dataio::Manifest generate_dataset(const GenConfig& config, const std::filesystem::path& out_dir);

/// File name helpers shared by the generator and the experiment loader.
std::string frame_file_name(int frame_index, const char* extension);

}  // namespace modref::scene
