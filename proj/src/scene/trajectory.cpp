#include <random>

#include "modref/rng.hpp"
#include "modref/scene/types.hpp"

namespace modref::scene {

namespace {

// Uniform Catmull-Rom over waypoints with duplicated endpoints; u in
// [0, n-1] where n = waypoint count.
Vec3 catmull_rom(const std::vector<Vec3>& w, double u) {
  const int segments = static_cast<int>(w.size()) - 1;
  int seg = std::clamp(static_cast<int>(u), 0, segments - 1);
  const double t = u - seg;
  auto at = [&](int i) { return w[std::clamp(i, 0, static_cast<int>(w.size()) - 1)]; };
  const Vec3 p0 = at(seg - 1), p1 = at(seg), p2 = at(seg + 1), p3 = at(seg + 2);
  const double t2 = t * t, t3 = t2 * t;
  return (p1 * 2.0 + (p2 - p0) * t + (p0 * 2.0 - p1 * 5.0 + p2 * 4.0 - p3) * t2 +
          ((p1 - p2) * 3.0 + p3 - p0) * t3) *
         0.5;
}

// Camera basis for a forward direction: x right, y down, z forward.
Mat3 look_rotation(Vec3 forward) {
  const Vec3 up{0.0, 1.0, 0.0};
  forward = normalized(forward);
  if (std::abs(forward.y) > 0.99) forward = normalized({forward.x + 0.05, 0.95, forward.z + 0.05});
  Vec3 x_cam = normalized(cross(up, forward));
  Vec3 z_cam = normalized(forward);
  Vec3 y_cam = cross(x_cam, z_cam);  // points down for an upright camera
  return Mat3::from_columns(x_cam, y_cam, z_cam);
}

}  // namespace

CameraTrajectory generate_trajectory(uint64_t seed, const SceneDescription& scene,
                                     int frame_count, int width, int height, double step_frac) {
  if (frame_count < 2) throw ConfigError("trajectory needs at least 2 frames (flow pairs)");
  if (width < 16 || height < 16) throw ConfigError("resolution must be at least 16x16");
  if (step_frac <= 0.0 || step_frac > 0.035)
    throw ConfigError("camera step fraction must be in (0, 0.035]");

  std::mt19937_64 rng(derive_seed(seed, "trajectory"));
  const double half = 0.4 * scene.bounds;
  std::uniform_real_distribution<double> pos(-half, half);
  std::uniform_real_distribution<double> eye(1.0, 2.0);

  const int waypoint_count = std::max(4, 4 + frame_count / 10);
  std::vector<Vec3> waypoints(waypoint_count);
  for (Vec3& w : waypoints) w = {pos(rng), eye(rng), pos(rng)};

  // dense arc-length table
  const int dense = 64 * (waypoint_count - 1);
  std::vector<Vec3> samples(dense + 1);
  std::vector<double> arclen(dense + 1, 0.0);
  for (int i = 0; i <= dense; ++i) {
    samples[i] = catmull_rom(waypoints, (waypoint_count - 1) * static_cast<double>(i) / dense);
    if (i > 0) arclen[i] = arclen[i - 1] + norm(samples[i] - samples[i - 1]);
  }
  const double total = arclen[dense];

  const double step = std::min(step_frac * scene.bounds, total / (frame_count - 1));

  auto position_at = [&](double s) {
    auto it = std::lower_bound(arclen.begin(), arclen.end(), s);
    int hi = std::clamp(static_cast<int>(it - arclen.begin()), 1, dense);
    const double seg = arclen[hi] - arclen[hi - 1];
    const double t = seg > 1e-12 ? (s - arclen[hi - 1]) / seg : 0.0;
    return samples[hi - 1] + (samples[hi] - samples[hi - 1]) * t;
  };

  CameraTrajectory traj;
  traj.intrinsics.f = 0.832 * width;  // ~62 degree horizontal field of view
  traj.intrinsics.cx = 0.5 * width;
  traj.intrinsics.cy = 0.5 * height;
  traj.poses.reserve(frame_count);

  const Vec3 scene_center{0.0, 1.2, 0.0};
  for (int i = 0; i < frame_count; ++i) {
    const double s = std::min(step * i, total);
    const Vec3 p = position_at(s);
    const Vec3 ahead = position_at(std::min(s + std::max(0.25 * step, 1e-3), total));
    Vec3 tangent = ahead - p;
    if (norm(tangent) < 1e-9) tangent = scene_center - p;
    Vec3 to_center = scene_center - p;
    Vec3 forward = normalized(normalized(tangent) * 0.6 + normalized(to_center) * 0.4);
    traj.poses.push_back(to_pose(look_rotation(forward), p));
  }
  return traj;
}

}  // namespace modref::scene
