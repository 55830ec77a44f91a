#include <random>

#include "modref/rng.hpp"
#include "modref/scene/types.hpp"

namespace modref::scene {

namespace {

struct Placement {
  double x, z, footprint;
};

std::array<float, 3> jitter_albedo(std::array<float, 3> base, std::mt19937_64& rng,
                                   float amount = 0.08f) {
  std::uniform_real_distribution<float> d(-amount, amount);
  for (float& c : base) c = std::clamp(c + d(rng), 0.02f, 0.98f);
  return base;
}

int sample_count(const CountRange& r, std::mt19937_64& rng) {
  if (r.hi < r.lo) throw ConfigError("primitive count range has hi < lo");
  if (r.hi == r.lo) return r.lo;
  std::uniform_int_distribution<int> d(r.lo, r.hi);
  return d(rng);
}

// Rejection-sample a center keeping every pair of footprints separated by
// half the sum of their radii.
Placement place(std::vector<Placement>& placed, double footprint, double bounds,
                int max_attempts, std::mt19937_64& rng, const char* what) {
  const double half = 0.45 * bounds;
  std::uniform_real_distribution<double> pos(-half, half);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Placement c{pos(rng), pos(rng), footprint};
    bool ok = true;
    for (const Placement& p : placed) {
      const double dx = c.x - p.x, dz = c.z - p.z;
      const double min_dist = 0.5 * (c.footprint + p.footprint);
      if (dx * dx + dz * dz < min_dist * min_dist) {
        ok = false;
        break;
      }
    }
    if (ok) {
      placed.push_back(c);
      return c;
    }
  }
  double area = 0.0;
  for (const Placement& p : placed) area += 3.14159 * p.footprint * p.footprint;
  throw GenerationError(std::string("could not place ") + what + " after " +
                        std::to_string(max_attempts) + " attempts (occupied area " +
                        std::to_string(area) + " m^2 of " + std::to_string(bounds * bounds) +
                        " m^2)");
}

}  // namespace

SceneDescription generate_scene(uint64_t seed, const SceneParams& params) {
  std::mt19937_64 rng(derive_seed(seed, "scene-gen"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SceneDescription scene;
  scene.bounds = params.bounds;

  scene.ground.grass_albedo = jitter_albedo({0.2f, 0.45f, 0.15f}, rng, 0.05f);
  scene.ground.path_albedo = jitter_albedo({0.55f, 0.5f, 0.4f}, rng, 0.05f);
  const double path_angle = unit(rng) * 3.14159265358979;
  scene.ground.path_nx = std::cos(path_angle);
  scene.ground.path_nz = std::sin(path_angle);
  scene.ground.path_offset = (unit(rng) - 0.5) * 0.5 * params.bounds;
  scene.ground.path_half_width = 0.5 + unit(rng) * 0.5;

  std::vector<Placement> placed;
  auto uniform = [&](double lo, double hi) { return lo + unit(rng) * (hi - lo); };

  const int trees = sample_count(params.trees, rng);
  for (int i = 0; i < trees; ++i) {
    const double trunk_r = uniform(0.08, 0.18);
    const double trunk_h = uniform(1.6, 2.8);
    const double canopy_r = uniform(0.7, 1.3);
    Placement c = place(placed, canopy_r, params.bounds, params.max_place_attempts, rng, "tree");
    Primitive trunk{ShapeKind::kCylinder,
                    {c.x, 0.0, c.z},
                    {trunk_r, trunk_h, 0.0},
                    kClassTree,
                    jitter_albedo({0.3f, 0.2f, 0.1f}, rng)};
    Primitive canopy{ShapeKind::kSphere,
                     {c.x, trunk_h + 0.5 * canopy_r, c.z},
                     {canopy_r, 0.0, 0.0},
                     kClassTree,
                     jitter_albedo({0.1f, 0.35f, 0.12f}, rng)};
    scene.primitives.push_back(trunk);
    scene.primitives.push_back(canopy);
  }

  const int hedges = sample_count(params.hedges, rng);
  for (int i = 0; i < hedges; ++i) {
    double hx = uniform(0.8, 2.0), hz = uniform(0.15, 0.3);
    if (unit(rng) < 0.5) std::swap(hx, hz);
    const double hy = uniform(0.3, 0.6);
    const double footprint = std::sqrt(hx * hx + hz * hz);
    Placement c = place(placed, footprint, params.bounds, params.max_place_attempts, rng, "hedge");
    scene.primitives.push_back({ShapeKind::kBox,
                                {c.x, hy, c.z},
                                {hx, hy, hz},
                                kClassHedge,
                                jitter_albedo({0.12f, 0.3f, 0.1f}, rng)});
  }

  const int bushes = sample_count(params.bushes, rng);
  for (int i = 0; i < bushes; ++i) {
    const double r = uniform(0.5, 0.9);
    Placement c = place(placed, r, params.bounds, params.max_place_attempts, rng, "bush");
    scene.primitives.push_back({ShapeKind::kSphere,
                                {c.x, 0.55 * r, c.z},
                                {r, 0.0, 0.0},
                                kClassBush,
                                jitter_albedo({0.15f, 0.4f, 0.18f}, rng)});
  }

  const int rocks = sample_count(params.rocks, rng);
  for (int i = 0; i < rocks; ++i) {
    const double r = uniform(0.3, 0.55);
    Placement c = place(placed, r, params.bounds, params.max_place_attempts, rng, "rock");
    scene.primitives.push_back({ShapeKind::kSphere,
                                {c.x, 0.35 * r, c.z},
                                {r, 0.0, 0.0},
                                kClassRock,
                                jitter_albedo({0.45f, 0.45f, 0.45f}, rng)});
  }

  const int flowers = sample_count(params.flowers, rng);
  for (int i = 0; i < flowers; ++i) {
    const double r = uniform(0.12, 0.18);
    Placement c = place(placed, 0.2, params.bounds, params.max_place_attempts, rng, "flower");
    scene.primitives.push_back({ShapeKind::kSphere,
                                {c.x, uniform(0.2, 0.35), c.z},
                                {r, 0.0, 0.0},
                                kClassFlower,
                                jitter_albedo({0.8f, 0.3f, 0.5f}, rng, 0.15f)});
  }

  return scene;
}

}  // namespace modref::scene
