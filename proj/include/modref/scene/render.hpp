#pragma once

#include "modref/image.hpp"
#include "modref/scene/types.hpp"

namespace modref::scene {

/// Closest-intersection result. `normal` is the outward geometric surface
/// normal in world coordinates (not yet oriented toward the camera).
struct Hit {
  bool hit = false;
  double dist = 0.0;  // along the unit ray direction
  Vec3 point;
  Vec3 normal;
  int class_id = kClassSky;
  std::array<float, 3> albedo{0, 0, 0};
};

/// Nearest analytic intersection of a world ray with the scene (primitives
/// plus the ground plane). Exposed so consistency checks can re-cast exact
/// rays.
Hit intersect_scene(const SceneDescription& scene, const Vec3& origin, const Vec3& dir,
                    double t_min = 1e-6);

/// Everything render_frame produces. Flow is frame t -> t+1; occlusion is
/// 255 where the surface point of frame t is not visible in frame t+1.
struct FrameGT {
  Rgb8Image rgb;
  DepthMap depth;
  NormalMap normal;
  LabelMap label;
  FlowField flow;
  GrayImage occlusion;
};

/// Color, depth, normals, labels for one frame (no successor needed).
struct FrameMaps {
  Rgb8Image rgb;
  DepthMap depth;
  NormalMap normal;
  LabelMap label;
};

FrameMaps render_frame_maps(const SceneDescription& scene, const CameraTrajectory& trajectory,
                            const LightingPreset& lighting, int frame_index, int width,
                            int height);

/// Full ground truth for frame_index; requires frame_index + 1 to exist
/// (IndexError otherwise).
FrameGT render_frame(const SceneDescription& scene, const CameraTrajectory& trajectory,
                     const LightingPreset& lighting, int frame_index, int width, int height);

/// Depth-only pass (camera-space z; sky carries kDepthSky).
DepthMap render_depth(const SceneDescription& scene, const Camera& camera, int width, int height);

}  // namespace modref::scene
