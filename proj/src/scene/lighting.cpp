#include "modref/scene/types.hpp"

namespace modref::scene {

std::vector<dataio::PaletteEntry> default_palette() {
  return {
      {kClassSky, "sky", {135, 206, 235}},
      {kClassGrass, "grass", {70, 140, 60}},
      {kClassPath, "path", {180, 160, 120}},
      {kClassTree, "tree", {40, 90, 40}},
      {kClassBush, "bush", {90, 160, 70}},
      {kClassFlower, "flower", {220, 80, 140}},
      {kClassRock, "rock", {130, 130, 130}},
      {kClassHedge, "hedge", {25, 70, 30}},
  };
}

namespace {

std::vector<LightingPreset> build_presets() {
  std::vector<LightingPreset> p;
  p.push_back({"clear", normalized({0.4, -0.75, 0.5}), {1.0f, 0.96f, 0.88f},
               {0.35f, 0.38f, 0.45f}, {0.45f, 0.68f, 0.95f}});
  p.push_back({"cloudy", normalized({0.3, -0.85, 0.4}), {0.55f, 0.55f, 0.58f},
               {0.5f, 0.52f, 0.55f}, {0.65f, 0.72f, 0.82f}});
  p.push_back({"overcast", normalized({0.1, -0.95, 0.2}), {0.22f, 0.22f, 0.24f},
               {0.6f, 0.62f, 0.65f}, {0.72f, 0.75f, 0.78f}});
  p.push_back({"sunset", normalized({0.8, -0.25, 0.54}), {1.0f, 0.55f, 0.25f},
               {0.4f, 0.3f, 0.3f}, {0.95f, 0.6f, 0.4f}});
  p.push_back({"twilight", normalized({0.7, -0.2, 0.69}), {0.25f, 0.2f, 0.35f},
               {0.2f, 0.2f, 0.3f}, {0.25f, 0.3f, 0.5f}});
  return p;
}

}  // namespace

std::span<const LightingPreset> all_lighting_presets() {
  static const std::vector<LightingPreset> presets = build_presets();
  return presets;
}

const LightingPreset& lighting_preset(std::string_view name) {
  for (const LightingPreset& p : all_lighting_presets())
    if (p.name == name) return p;
  throw ConfigError("unknown lighting preset: " + std::string(name));
}

}  // namespace modref::scene
