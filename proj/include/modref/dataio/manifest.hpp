#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "modref/error.hpp"

namespace modref::dataio {

struct Intrinsics {
  double f = 0.0;   // focal length, pixels
  double cx = 0.0;  // principal point, pixels
  double cy = 0.0;

  bool operator==(const Intrinsics&) const = default;
};

/// Camera-to-world pose. r is row-major 3x3; columns are the world
/// directions of the camera x (right), y (down), z (forward) axes.
struct Pose {
  std::array<double, 9> r{1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::array<double, 3> t{0, 0, 0};

  bool operator==(const Pose&) const = default;
};

struct SceneEntry {
  int scene_id = 0;
  std::string lighting_preset;
  int frame_count = 0;
  Intrinsics intrinsics;
  std::vector<Pose> poses;  // one per frame

  bool operator==(const SceneEntry&) const = default;
};

struct PaletteEntry {
  int class_id = 0;
  std::string name;
  std::array<uint8_t, 3> rgb{0, 0, 0};

  bool operator==(const PaletteEntry&) const = default;
};

struct Manifest {
  int schema_version = 1;
  uint64_t rng_seed = 0;
  std::vector<PaletteEntry> class_palette;
  std::vector<SceneEntry> scenes;

  bool operator==(const Manifest&) const = default;
};

inline constexpr int kManifestSchemaVersion = 1;

/// Max allowed deviation of R^T R from identity (inf norm).
inline constexpr double kRotationOrthoTolerance = 1e-6;

/// Throws ValidationError / VersionError when invariants do not hold:
/// frame_count >= 2 and == poses.size(), contiguous class ids 0..C-1,
/// orthonormal rotations.
void validate_manifest(const Manifest& manifest);

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

double rotation_orthonormality_error(const std::array<double, 9>& r);

}  // namespace modref::dataio
