#include "modref/scene/dataset.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "modref/dataio/flo.hpp"
#include "modref/dataio/pfm.hpp"
#include "modref/dataio/pnm.hpp"
#include "modref/rng.hpp"

namespace modref::scene {

using nlohmann::json;

std::string frame_file_name(int frame_index, const char* extension) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%05d.%s", frame_index, extension);
  return buf;
}

GenConfig load_gen_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("config parse error in " + path.string() + ": " + e.what());
  }

  GenConfig c;
  try {
    c.scenes = j.value("scenes", c.scenes);
    c.frames = j.value("frames", c.frames);
    c.width = j.value("width", c.width);
    c.height = j.value("height", c.height);
    c.seed = j.value("seed", c.seed);
    c.camera_step_frac = j.value("camera_step_frac", c.camera_step_frac);
    if (j.contains("lighting_mode")) {
      const std::string mode = j["lighting_mode"].get<std::string>();
      if (mode == "all") c.lighting_mode = LightingMode::kAll;
      else if (mode == "cycle") c.lighting_mode = LightingMode::kCycle;
      else throw ConfigError("lighting_mode must be 'all' or 'cycle', got '" + mode + "'");
    }
    if (j.contains("presets")) c.presets = j["presets"].get<std::vector<std::string>>();
    if (j.contains("bounds")) c.params.bounds = j["bounds"].get<double>();
    auto range = [&](const char* key, CountRange& r) {
      if (!j.contains(key)) return;
      auto arr = j[key];
      r.lo = arr.at(0).get<int>();
      r.hi = arr.at(1).get<int>();
    };
    range("trees", c.params.trees);
    range("bushes", c.params.bushes);
    range("flowers", c.params.flowers);
    range("rocks", c.params.rocks);
    range("hedges", c.params.hedges);
  } catch (const json::exception& e) {
    throw FormatError("config field error in " + path.string() + ": " + e.what());
  }
  return c;
}

namespace {

std::vector<std::string> resolve_presets(const GenConfig& config, int scene_index) {
  std::vector<std::string> names;
  if (config.presets.empty()) {
    for (const LightingPreset& p : all_lighting_presets()) names.push_back(p.name);
  } else {
    names = config.presets;
    for (const std::string& n : names) lighting_preset(n);  // validate early
  }
  if (config.lighting_mode == LightingMode::kCycle)
    return {names[static_cast<size_t>(scene_index) % names.size()]};
  return names;
}

}  // namespace

dataio::Manifest generate_dataset(const GenConfig& config, const std::filesystem::path& out_dir) {
  if (config.scenes < 1) throw ConfigError("dataset needs at least one scene");
  if (config.frames < 2) throw ConfigError("dataset needs at least 2 frames per scene");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  dataio::Manifest manifest;
  manifest.rng_seed = config.seed;
  manifest.class_palette = default_palette();

  for (int scene_id = 0; scene_id < config.scenes; ++scene_id) {
    const SceneDescription scene =
        generate_scene(derive_seed(config.seed, "scene", scene_id), config.params);
    const CameraTrajectory traj =
        generate_trajectory(derive_seed(config.seed, "traj", scene_id), scene, config.frames,
                            config.width, config.height, config.camera_step_frac);

    for (const std::string& preset_name : resolve_presets(config, scene_id)) {
      const LightingPreset& preset = lighting_preset(preset_name);
      const std::filesystem::path base =
          out_dir / ("scene_" + std::to_string(scene_id)) / preset_name;
      for (const char* sub : {"rgb", "depth", "normal", "label", "flow", "occl"}) {
        std::filesystem::create_directories(base / sub, ec);
        if (ec) throw IoError("cannot create " + (base / sub).string() + ": " + ec.message());
      }

      for (int f = 0; f < config.frames; ++f) {
        if (f + 1 < config.frames) {
          FrameGT gt = render_frame(scene, traj, preset, f, config.width, config.height);
          dataio::write_pnm(gt.rgb, base / "rgb" / frame_file_name(f, "ppm"));
          dataio::write_pfm(gt.depth, base / "depth" / frame_file_name(f, "pfm"));
          dataio::write_pfm(gt.normal, base / "normal" / frame_file_name(f, "pfm"));
          dataio::write_pnm(gt.label, base / "label" / frame_file_name(f, "pgm"));
          dataio::write_flo(gt.flow, base / "flow" / frame_file_name(f, "flo"));
          dataio::write_pnm(gt.occlusion, base / "occl" / frame_file_name(f, "pgm"));
        } else {
          // final frame: no successor, so no flow/occlusion
          FrameMaps maps =
              render_frame_maps(scene, traj, preset, f, config.width, config.height);
          dataio::write_pnm(maps.rgb, base / "rgb" / frame_file_name(f, "ppm"));
          dataio::write_pfm(maps.depth, base / "depth" / frame_file_name(f, "pfm"));
          dataio::write_pfm(maps.normal, base / "normal" / frame_file_name(f, "pfm"));
          dataio::write_pnm(maps.label, base / "label" / frame_file_name(f, "pgm"));
        }
      }

      dataio::SceneEntry entry;
      entry.scene_id = scene_id;
      entry.lighting_preset = preset_name;
      entry.frame_count = config.frames;
      entry.intrinsics = traj.intrinsics;
      entry.poses = traj.poses;
      manifest.scenes.push_back(std::move(entry));
    }
  }

  dataio::write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace modref::scene
