#include "modref/dataio/manifest.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace modref::dataio {

using nlohmann::json;

double rotation_orthonormality_error(const std::array<double, 9>& r) {
  double err = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;  // (R^T R)_{ij} = column_i . column_j
      for (int k = 0; k < 3; ++k) dot += r[3 * k + i] * r[3 * k + j];
      err = std::max(err, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return err;
}

void validate_manifest(const Manifest& m) {
  if (m.schema_version != kManifestSchemaVersion)
    throw VersionError("manifest schema_version " + std::to_string(m.schema_version) +
                       " != supported " + std::to_string(kManifestSchemaVersion));
  for (size_t i = 0; i < m.class_palette.size(); ++i)
    if (m.class_palette[i].class_id != static_cast<int>(i))
      throw ValidationError("class ids must be contiguous 0..C-1");
  for (const SceneEntry& s : m.scenes) {
    if (s.frame_count < 2)
      throw ValidationError("scene " + std::to_string(s.scene_id) +
                            ": frame_count must be >= 2 (flow needs pairs)");
    if (static_cast<int>(s.poses.size()) != s.frame_count)
      throw ValidationError("scene " + std::to_string(s.scene_id) +
                            ": pose count does not match frame_count");
    if (s.intrinsics.f <= 0.0)
      throw ValidationError("scene " + std::to_string(s.scene_id) + ": focal length must be > 0");
    for (const Pose& p : s.poses) {
      double err = rotation_orthonormality_error(p.r);
      if (err > kRotationOrthoTolerance)
        throw ValidationError("scene " + std::to_string(s.scene_id) +
                              ": rotation not orthonormal (error " + std::to_string(err) + ")");
    }
  }
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  validate_manifest(m);
  json j;
  j["schema_version"] = m.schema_version;
  j["rng_seed"] = m.rng_seed;
  j["class_palette"] = json::array();
  for (const PaletteEntry& p : m.class_palette)
    j["class_palette"].push_back(
        {{"id", p.class_id}, {"name", p.name}, {"rgb", {p.rgb[0], p.rgb[1], p.rgb[2]}}});
  j["scenes"] = json::array();
  for (const SceneEntry& s : m.scenes) {
    json js;
    js["scene_id"] = s.scene_id;
    js["lighting_preset"] = s.lighting_preset;
    js["frame_count"] = s.frame_count;
    js["intrinsics"] = {{"f", s.intrinsics.f}, {"cx", s.intrinsics.cx}, {"cy", s.intrinsics.cy}};
    js["poses"] = json::array();
    for (const Pose& p : s.poses) js["poses"].push_back({{"r", p.r}, {"t", p.t}});
    j["scenes"].push_back(std::move(js));
  }

  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("manifest parse error in " + path.string() + ": " + e.what());
  }

  Manifest m;
  try {
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kManifestSchemaVersion)
      throw VersionError("manifest schema_version " + std::to_string(m.schema_version) +
                         " != supported " + std::to_string(kManifestSchemaVersion));
    m.rng_seed = j.at("rng_seed").get<uint64_t>();
    for (const json& jp : j.at("class_palette")) {
      PaletteEntry p;
      p.class_id = jp.at("id").get<int>();
      p.name = jp.at("name").get<std::string>();
      auto rgb = jp.at("rgb");
      for (int k = 0; k < 3; ++k) p.rgb[k] = rgb.at(k).get<uint8_t>();
      m.class_palette.push_back(std::move(p));
    }
    for (const json& js : j.at("scenes")) {
      SceneEntry s;
      s.scene_id = js.at("scene_id").get<int>();
      s.lighting_preset = js.at("lighting_preset").get<std::string>();
      s.frame_count = js.at("frame_count").get<int>();
      s.intrinsics.f = js.at("intrinsics").at("f").get<double>();
      s.intrinsics.cx = js.at("intrinsics").at("cx").get<double>();
      s.intrinsics.cy = js.at("intrinsics").at("cy").get<double>();
      for (const json& jp : js.at("poses")) {
        Pose p;
        for (int k = 0; k < 9; ++k) p.r[k] = jp.at("r").at(k).get<double>();
        for (int k = 0; k < 3; ++k) p.t[k] = jp.at("t").at(k).get<double>();
        s.poses.push_back(p);
      }
      m.scenes.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw FormatError("manifest field error in " + path.string() + ": " + e.what());
  }
  validate_manifest(m);
  return m;
}

}  // namespace modref::dataio
