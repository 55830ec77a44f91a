#include "modref/scene/render.hpp"

#include <cmath>
#include <limits>

namespace modref::scene {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Visibility is decided by re-casting the exact ray from the next camera
// through the continuous projection of the hit point (the depth function
// sampled at the projection itself, free of pixel quantization). A point is
// occluded when something sits more than this many meters in front of it.
constexpr double kOcclusionDistTolerance = 5e-4;

bool sphere_intersect(const Vec3& o, const Vec3& d, const Vec3& c, double r, double t_min,
                      double& t_out) {
  const Vec3 oc = o - c;
  const double b = dot(oc, d);
  const double disc = b * b - (dot(oc, oc) - r * r);
  if (disc < 0.0) return false;
  const double s = std::sqrt(disc);
  double t = -b - s;
  if (t < t_min) t = -b + s;
  if (t < t_min) return false;
  t_out = t;
  return true;
}

bool box_intersect(const Vec3& o, const Vec3& d, const Vec3& c, const Vec3& h, double t_min,
                   double& t_out, Vec3& n_out) {
  double t_enter = -kInf, t_exit = kInf;
  int enter_axis = 0, exit_axis = 0;
  double enter_sign = 0.0, exit_sign = 0.0;
  const double od[3] = {o.x - c.x, o.y - c.y, o.z - c.z};
  const double dd[3] = {d.x, d.y, d.z};
  const double hh[3] = {h.x, h.y, h.z};
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dd[a]) < 1e-12) {
      if (std::abs(od[a]) > hh[a]) return false;
      continue;
    }
    double t0 = (-hh[a] - od[a]) / dd[a];
    double t1 = (hh[a] - od[a]) / dd[a];
    double sign = dd[a] > 0 ? -1.0 : 1.0;  // entry face normal opposes the ray
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_enter) {
      t_enter = t0;
      enter_axis = a;
      enter_sign = sign;
    }
    if (t1 < t_exit) {
      t_exit = t1;
      exit_axis = a;
      exit_sign = -sign;
    }
  }
  if (t_enter > t_exit) return false;
  double t = t_enter;
  int axis = enter_axis;
  double sign = enter_sign;
  if (t < t_min) {
    t = t_exit;
    axis = exit_axis;
    sign = exit_sign;
    if (t < t_min) return false;
  }
  t_out = t;
  n_out = {axis == 0 ? sign : 0.0, axis == 1 ? sign : 0.0, axis == 2 ? sign : 0.0};
  return true;
}

bool cylinder_intersect(const Vec3& o, const Vec3& d, const Vec3& base, double r, double h,
                        double t_min, double& t_out, Vec3& n_out) {
  double best = kInf;
  Vec3 best_n;
  // side surface
  const double ox = o.x - base.x, oz = o.z - base.z;
  const double a = d.x * d.x + d.z * d.z;
  if (a > 1e-14) {
    const double b = ox * d.x + oz * d.z;
    const double c = ox * ox + oz * oz - r * r;
    const double disc = b * b - a * c;
    if (disc >= 0.0) {
      const double s = std::sqrt(disc);
      for (double t : {(-b - s) / a, (-b + s) / a}) {
        if (t < t_min || t >= best) continue;
        const double y = o.y + t * d.y;
        if (y < base.y || y > base.y + h) continue;
        best = t;
        best_n = normalized({o.x + t * d.x - base.x, 0.0, o.z + t * d.z - base.z});
        break;
      }
    }
  }
  // caps
  for (int cap = 0; cap < 2; ++cap) {
    const double cy = base.y + (cap ? h : 0.0);
    if (std::abs(d.y) < 1e-12) continue;
    const double t = (cy - o.y) / d.y;
    if (t < t_min || t >= best) continue;
    const double px = o.x + t * d.x - base.x, pz = o.z + t * d.z - base.z;
    if (px * px + pz * pz > r * r) continue;
    best = t;
    best_n = {0.0, cap ? 1.0 : -1.0, 0.0};
  }
  if (best == kInf) return false;
  t_out = best;
  n_out = best_n;
  return true;
}

}  // namespace

Hit intersect_scene(const SceneDescription& scene, const Vec3& origin, const Vec3& dir,
                    double t_min) {
  Hit hit;
  hit.dist = kInf;

  // ground plane y = 0
  if (std::abs(dir.y) > 1e-12) {
    const double t = -origin.y / dir.y;
    if (t > t_min) {
      hit.hit = true;
      hit.dist = t;
      hit.point = origin + dir * t;
      hit.normal = {0.0, 1.0, 0.0};
      const double signed_dist =
          hit.point.x * scene.ground.path_nx + hit.point.z * scene.ground.path_nz;
      const bool on_path =
          std::abs(signed_dist - scene.ground.path_offset) < scene.ground.path_half_width;
      hit.class_id = on_path ? kClassPath : kClassGrass;
      hit.albedo = on_path ? scene.ground.path_albedo : scene.ground.grass_albedo;
    }
  }

  for (const Primitive& prim : scene.primitives) {
    double t;
    Vec3 n;
    bool ok = false;
    switch (prim.kind) {
      case ShapeKind::kSphere:
        ok = sphere_intersect(origin, dir, prim.center, prim.extent.x, t_min, t);
        if (ok) n = normalized(origin + dir * t - prim.center);
        break;
      case ShapeKind::kBox:
        ok = box_intersect(origin, dir, prim.center, prim.extent, t_min, t, n);
        break;
      case ShapeKind::kCylinder:
        ok = cylinder_intersect(origin, dir, prim.center, prim.extent.x, prim.extent.y, t_min, t,
                                n);
        break;
    }
    if (ok && t < hit.dist) {
      hit.hit = true;
      hit.dist = t;
      hit.point = origin + dir * t;
      hit.normal = n;
      hit.class_id = prim.class_id;
      hit.albedo = prim.albedo;
    }
  }
  return hit;
}

DepthMap render_depth(const SceneDescription& scene, const Camera& camera, int width,
                      int height) {
  DepthMap depth(width, height, kDepthSky);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec3 dir = camera.ray_dir(x + 0.5, y + 0.5);
      const Hit hit = intersect_scene(scene, camera.center, dir);
      if (hit.hit) depth.at(x, y) = static_cast<float>(camera.to_camera(hit.point).z);
    }
  }
  return depth;
}

namespace {

void shade_and_store(const Hit& hit, const Camera& cam, const Vec3& ray_world,
                     const LightingPreset& light, int x, int y, FrameMaps& maps) {
  if (!hit.hit) {
    maps.depth.at(x, y) = kDepthSky;
    maps.label.at(x, y) = kClassSky;
    uint8_t* px = maps.rgb.at(x, y);
    for (int k = 0; k < 3; ++k)
      px[k] = static_cast<uint8_t>(std::lround(std::clamp(light.sky_rgb[k], 0.0f, 1.0f) * 255.0f));
    return;
  }

  // orient the normal toward the camera
  Vec3 n_world = hit.normal;
  if (dot(n_world, ray_world) > 0.0) n_world = -n_world;
  const Vec3 n_cam = cam.rot.transposed_mul(n_world);

  const Vec3 p_cam = cam.to_camera(hit.point);
  maps.depth.at(x, y) = static_cast<float>(p_cam.z);
  maps.label.at(x, y) = hit.class_id;
  float* n = maps.normal.at(x, y);
  n[0] = static_cast<float>(n_cam.x);
  n[1] = static_cast<float>(n_cam.y);
  n[2] = static_cast<float>(n_cam.z);

  const double lambert = std::max(0.0, dot(n_world, -light.sun_dir));
  uint8_t* px = maps.rgb.at(x, y);
  for (int k = 0; k < 3; ++k) {
    const double v =
        hit.albedo[k] * (light.ambient_rgb[k] + light.sun_rgb[k] * lambert);
    px[k] = static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  }
}

}  // namespace

FrameMaps render_frame_maps(const SceneDescription& scene, const CameraTrajectory& trajectory,
                            const LightingPreset& lighting, int frame_index, int width,
                            int height) {
  if (frame_index < 0 || frame_index >= static_cast<int>(trajectory.poses.size()))
    throw IndexError("frame index " + std::to_string(frame_index) + " out of range");
  if (width < 16 || height < 16) throw ConfigError("resolution must be at least 16x16");

  const Camera cam = make_camera(trajectory.intrinsics, trajectory.poses[frame_index]);
  FrameMaps maps{Rgb8Image(width, height), DepthMap(width, height, kDepthSky),
                 NormalMap(width, height), LabelMap(width, height, kClassSky)};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Vec3 dir = cam.ray_dir(x + 0.5, y + 0.5);
      const Hit hit = intersect_scene(scene, cam.center, dir);
      shade_and_store(hit, cam, dir, lighting, x, y, maps);
    }
  }
  return maps;
}

FrameGT render_frame(const SceneDescription& scene, const CameraTrajectory& trajectory,
                     const LightingPreset& lighting, int frame_index, int width, int height) {
  if (frame_index < 0 || frame_index + 1 >= static_cast<int>(trajectory.poses.size()))
    throw IndexError("frame index " + std::to_string(frame_index) +
                     " has no successor for flow (frame count " +
                     std::to_string(trajectory.poses.size()) + ")");
  if (width < 16 || height < 16) throw ConfigError("resolution must be at least 16x16");

  const Camera cam = make_camera(trajectory.intrinsics, trajectory.poses[frame_index]);
  const Camera cam_next = make_camera(trajectory.intrinsics, trajectory.poses[frame_index + 1]);

  FrameGT gt;
  gt.rgb = Rgb8Image(width, height);
  gt.depth = DepthMap(width, height, kDepthSky);
  gt.normal = NormalMap(width, height);
  gt.label = LabelMap(width, height, kClassSky);
  gt.flow = FlowField(width, height);
  gt.occlusion = GrayImage(width, height, 0);

  FrameMaps maps{std::move(gt.rgb), std::move(gt.depth), std::move(gt.normal),
                 std::move(gt.label)};

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const Vec3 dir = cam.ray_dir(px, py);
      const Hit hit = intersect_scene(scene, cam.center, dir);
      shade_and_store(hit, cam, dir, lighting, x, y, maps);

      if (!hit.hit) {
        // sky: rotation-only motion model (point at infinity)
        double u2, v2;
        if (!cam_next.project_direction(dir, u2, v2)) {
          gt.occlusion.at(x, y) = 255;
          continue;
        }
        gt.flow.u(x, y) = static_cast<float>(u2 - px);
        gt.flow.v(x, y) = static_cast<float>(v2 - py);
        const bool inside = u2 >= 0.0 && u2 <= width && v2 >= 0.0 && v2 <= height;
        if (!inside || intersect_scene(scene, cam_next.center, dir).hit)
          gt.occlusion.at(x, y) = 255;
        continue;
      }

      double u2, v2, z2;
      if (!cam_next.project(hit.point, u2, v2, z2)) {
        gt.occlusion.at(x, y) = 255;
        continue;
      }
      gt.flow.u(x, y) = static_cast<float>(u2 - px);
      gt.flow.v(x, y) = static_cast<float>(v2 - py);

      if (u2 < 0.0 || u2 > width || v2 < 0.0 || v2 > height) {
        gt.occlusion.at(x, y) = 255;
        continue;
      }
      const Vec3 to_point = hit.point - cam_next.center;
      const double dist = norm(to_point);
      const Hit recast = intersect_scene(scene, cam_next.center, to_point * (1.0 / dist));
      if (!recast.hit || std::abs(recast.dist - dist) > kOcclusionDistTolerance)
        gt.occlusion.at(x, y) = 255;
    }
  }

  gt.rgb = std::move(maps.rgb);
  gt.depth = std::move(maps.depth);
  gt.normal = std::move(maps.normal);
  gt.label = std::move(maps.label);
  return gt;
}

}  // namespace modref::scene
