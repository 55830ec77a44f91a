#pragma once

#include <array>
#include <cmath>

#include "modref/dataio/manifest.hpp"

namespace modref::scene {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }

  bool operator==(const Vec3&) const = default;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) {
  double n = norm(v);
  return n > 0.0 ? v * (1.0 / n) : Vec3{0, 0, 0};
}

/// Row-major 3x3.
struct Mat3 {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
    return {{c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z}};
  }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  /// R^T v (the inverse for orthonormal R).
  Vec3 transposed_mul(const Vec3& v) const {
    return {m[0] * v.x + m[3] * v.y + m[6] * v.z, m[1] * v.x + m[4] * v.y + m[7] * v.z,
            m[2] * v.x + m[5] * v.y + m[8] * v.z};
  }

  bool operator==(const Mat3&) const = default;
};

/// Pinhole camera with x right, y down, z forward; pixel centers at
/// (i + 0.5, j + 0.5).
struct Camera {
  dataio::Intrinsics intr;
  Mat3 rot;    // camera-to-world
  Vec3 center;

  /// World-space unit direction through continuous pixel coords (px, py).
  Vec3 ray_dir(double px, double py) const {
    Vec3 d_cam{(px - intr.cx) / intr.f, (py - intr.cy) / intr.f, 1.0};
    return normalized(rot * d_cam);
  }

  Vec3 to_camera(const Vec3& world) const { return rot.transposed_mul(world - center); }

  /// Projects a world point; returns false when it lies at or behind the
  /// camera plane. z receives the camera-space depth.
  bool project(const Vec3& world, double& u, double& v, double& z) const {
    Vec3 c = to_camera(world);
    z = c.z;
    if (c.z < 1e-9) return false;
    u = intr.f * c.x / c.z + intr.cx;
    v = intr.f * c.y / c.z + intr.cy;
    return true;
  }

  /// Projects a direction (point at infinity) under rotation only.
  bool project_direction(const Vec3& dir_world, double& u, double& v) const {
    Vec3 d = rot.transposed_mul(dir_world);
    if (d.z < 1e-9) return false;
    u = intr.f * d.x / d.z + intr.cx;
    v = intr.f * d.y / d.z + intr.cy;
    return true;
  }
};

inline Camera make_camera(const dataio::Intrinsics& intr, const dataio::Pose& pose) {
  Camera cam;
  cam.intr = intr;
  cam.rot = Mat3{pose.r};
  cam.center = {pose.t[0], pose.t[1], pose.t[2]};
  return cam;
}

inline dataio::Pose to_pose(const Mat3& rot, const Vec3& center) {
  dataio::Pose p;
  p.r = rot.m;
  p.t = {center.x, center.y, center.z};
  return p;
}

}  // namespace modref::scene
