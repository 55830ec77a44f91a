#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "modref/nn/tensor.hpp"

namespace modref::nn {

/// Rebuilds the scalar loss from the current leaf values. Called repeatedly
/// by the finite-difference driver while it perturbs leaf coordinates.
using LossBuilder = std::function<Var<double>()>;

/// Central finite differences against analytic gradients, float64.
/// Error metric per coordinate: |a - n| / max(1, |a|, |n|).
/// max_coords_per_tensor == 0 checks every coordinate; otherwise a seeded
/// random subset per tensor.
double finite_diff_max_rel_error(const LossBuilder& build, std::span<const Var<double>> wrt,
                                 double eps = 1e-4, int max_coords_per_tensor = 0,
                                 uint64_t seed = 0);

struct GradCheckReport {
  std::string op;
  double max_rel_error = 0.0;
};

/// Per-op finite-difference suite over randomized shapes (up to 2x8x9x9).
std::vector<GradCheckReport> run_op_gradchecks(uint64_t seed = 1234);

/// Threshold every per-op check must beat.
inline constexpr double kOpGradTolerance = 1e-5;

}  // namespace modref::nn
