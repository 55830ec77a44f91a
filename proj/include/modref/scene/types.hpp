#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "modref/dataio/manifest.hpp"
#include "modref/scene/geometry.hpp"

namespace modref::scene {

/// Semantic classes. Every rendered pixel receives exactly one.
enum SceneClass : int {
  kClassSky = 0,
  kClassGrass = 1,
  kClassPath = 2,
  kClassTree = 3,
  kClassBush = 4,
  kClassFlower = 5,
  kClassRock = 6,
  kClassHedge = 7,
  kClassCount = 8,
};

std::vector<dataio::PaletteEntry> default_palette();

enum class ShapeKind { kSphere, kBox, kCylinder };

/// Analytic primitive. extent meaning per kind:
///   sphere:   extent.x = radius
///   box:      extent = half extents, center at box middle
///   cylinder: extent.x = radius, extent.y = height; center = base center
///             (axis vertical, y in [center.y, center.y + height])
struct Primitive {
  ShapeKind kind = ShapeKind::kSphere;
  Vec3 center;
  Vec3 extent;
  int class_id = 0;
  std::array<float, 3> albedo{0.5f, 0.5f, 0.5f};

  bool operator==(const Primitive&) const = default;
};

/// The single ground plane (y = 0) with a straight path strip: pixels whose
/// xz projection lies within half_width of the line
/// { p : <(p.x, p.z), normal> = offset } take the path class.
struct GroundInfo {
  std::array<float, 3> grass_albedo{0.2f, 0.45f, 0.15f};
  std::array<float, 3> path_albedo{0.55f, 0.5f, 0.4f};
  double path_nx = 1.0, path_nz = 0.0;  // unit normal of the path axis, xz
  double path_offset = 0.0;             // meters
  double path_half_width = 0.8;         // meters

  bool operator==(const GroundInfo&) const = default;
};

struct LightingPreset {
  std::string name;
  Vec3 sun_dir;  // direction light travels; unit, sun_dir.y < 0
  std::array<float, 3> sun_rgb;
  std::array<float, 3> ambient_rgb;
  std::array<float, 3> sky_rgb;
};

/// The five fixed presets: clear, cloudy, overcast, sunset, twilight.
std::span<const LightingPreset> all_lighting_presets();
const LightingPreset& lighting_preset(std::string_view name);  // ConfigError if unknown

struct SceneDescription {
  std::vector<Primitive> primitives;  // excludes the ground plane
  GroundInfo ground;
  double bounds = 20.0;  // square side length, meters, centered at origin

  bool operator==(const SceneDescription&) const = default;
};

struct CountRange {
  int lo = 0, hi = 0;

  bool operator==(const CountRange&) const = default;
};

// Counts and sizes keep the total label-edge length low enough that
// sub-pixel rounding at boundaries stays within the 1% budget of the
// flow-warp consistency checks at 64x64.
struct SceneParams {
  double bounds = 20.0;
  CountRange trees{2, 4};
  CountRange bushes{3, 6};
  CountRange flowers{3, 6};
  CountRange rocks{2, 4};
  CountRange hedges{1, 2};
  int max_place_attempts = 1000;

  bool operator==(const SceneParams&) const = default;
};

/// Deterministic under seed. Trees are trunk+canopy pairs sharing one
/// placement footprint. Throws GenerationError when rejection sampling
/// cannot place a primitive within max_place_attempts.
SceneDescription generate_scene(uint64_t seed, const SceneParams& params);

struct CameraTrajectory {
  dataio::Intrinsics intrinsics;     // constant within a sequence
  std::vector<dataio::Pose> poses;   // camera-to-world, one per frame
  double frame_period = 1.0 / 30.0;  // seconds, informational

  bool operator==(const CameraTrajectory&) const = default;
};

/// Catmull-Rom walk through random waypoints at eye height 1-2 m, oriented
/// along the tangent blended toward the scene center. Consecutive centers
/// move less than 5% of the scene bounds per frame.
CameraTrajectory generate_trajectory(uint64_t seed, const SceneDescription& scene,
                                     int frame_count, int width, int height,
                                     double step_frac = 0.006);

}  // namespace modref::scene
