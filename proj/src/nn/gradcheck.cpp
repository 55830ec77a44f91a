#include "modref/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "modref/image.hpp"
#include "modref/nn/losses.hpp"
#include "modref/nn/ops.hpp"

namespace modref::nn {

double finite_diff_max_rel_error(const LossBuilder& build, std::span<const Var<double>> wrt,
                                 double eps, int max_coords_per_tensor, uint64_t seed) {
  // analytic pass
  Var<double> loss = build();
  backward(loss);
  std::vector<std::vector<double>> analytic;
  analytic.reserve(wrt.size());
  for (const Var<double>& t : wrt) analytic.push_back(t->grad);

  std::mt19937_64 rng(seed);
  double max_err = 0.0;
  for (size_t ti = 0; ti < wrt.size(); ++ti) {
    Var<double> t = wrt[ti];
    std::vector<size_t> coords(t->size());
    for (size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    if (max_coords_per_tensor > 0 &&
        coords.size() > static_cast<size_t>(max_coords_per_tensor)) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(static_cast<size_t>(max_coords_per_tensor));
      std::sort(coords.begin(), coords.end());
    }
    for (size_t i : coords) {
      const double orig = t->value[i];
      t->value[i] = orig + eps;
      const double lp = build()->value[0];
      t->value[i] = orig - eps;
      const double lm = build()->value[0];
      t->value[i] = orig;
      const double numeric = (lp - lm) / (2.0 * eps);
      const double a = analytic[ti][i];
      const double err = std::abs(a - numeric) / std::max({1.0, std::abs(a), std::abs(numeric)});
      max_err = std::max(max_err, err);
    }
  }
  return max_err;
}

namespace {

Var<double> random_tensor(std::vector<int> shape, std::mt19937_64& rng, bool requires_grad,
                          double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(numel(shape));
  for (double& x : v) x = dist(rng);
  Var<double> t = make_constant<double>(std::move(shape), std::move(v));
  t->requires_grad = requires_grad;
  return t;
}

std::vector<double> random_weights(size_t count, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> w(count);
  for (double& x : w) x = dist(rng);
  return w;
}

MaskBatch random_mask(int n, int h, int w, std::mt19937_64& rng) {
  MaskBatch m{n, h, w, std::vector<uint8_t>(static_cast<size_t>(n) * h * w, 0)};
  std::bernoulli_distribution keep(0.8);
  bool any = false;
  for (uint8_t& v : m.valid) {
    v = keep(rng) ? 1 : 0;
    any = any || v;
  }
  if (!any) m.valid[0] = 1;
  return m;
}

}  // namespace

std::vector<GradCheckReport> run_op_gradchecks(uint64_t seed) {
  std::vector<GradCheckReport> reports;
  std::mt19937_64 rng(seed);

  {  // conv2d, stride 1, same padding
    Var<double> x = random_tensor({2, 3, 5, 5}, rng, true);
    Var<double> w = random_tensor({4, 3, 3, 3}, rng, true);
    Var<double> b = random_tensor({4}, rng, true);
    std::vector<double> pw = random_weights(2 * 4 * 5 * 5, rng);
    LossBuilder build = [&] { return reduce_weighted<double>(conv2d(x, w, b, 1, 1), pw); };
    std::array<Var<double>, 3> wrt = {x, w, b};
    reports.push_back({"conv2d", finite_diff_max_rel_error(build, wrt)});
  }
  {  // conv2d, stride 2
    Var<double> x = random_tensor({1, 2, 9, 9}, rng, true);
    Var<double> w = random_tensor({3, 2, 3, 3}, rng, true);
    Var<double> b = random_tensor({3}, rng, true);
    std::vector<double> pw = random_weights(1 * 3 * 4 * 4, rng);
    LossBuilder build = [&] { return reduce_weighted<double>(conv2d(x, w, b, 2, 0), pw); };
    std::array<Var<double>, 3> wrt = {x, w, b};
    reports.push_back({"conv2d_stride2", finite_diff_max_rel_error(build, wrt)});
  }
  {  // relu; inputs kept away from the kink at 0
    Var<double> x = random_tensor({2, 4, 6, 6}, rng, true);
    for (double& v : x->value)
      if (std::abs(v) < 0.05) v = v < 0 ? v - 0.1 : v + 0.1;
    std::vector<double> pw = random_weights(x->size(), rng);
    LossBuilder build = [&] { return reduce_weighted<double>(relu(x), pw); };
    std::array<Var<double>, 1> wrt = {x};
    reports.push_back({"relu", finite_diff_max_rel_error(build, wrt)});
  }
  {  // concat
    Var<double> a = random_tensor({2, 2, 4, 4}, rng, true);
    Var<double> b = random_tensor({2, 3, 4, 4}, rng, true);
    Var<double> c = random_tensor({2, 1, 4, 4}, rng, true);
    std::vector<double> pw = random_weights(2 * 6 * 4 * 4, rng);
    LossBuilder build = [&] {
      std::array<Var<double>, 3> xs = {a, b, c};
      return reduce_weighted<double>(concat_channels<double>(xs), pw);
    };
    std::array<Var<double>, 3> wrt = {a, b, c};
    reports.push_back({"concat_channels", finite_diff_max_rel_error(build, wrt)});
  }
  {  // upsample
    Var<double> x = random_tensor({2, 3, 4, 5}, rng, true);
    std::vector<double> pw = random_weights(2 * 3 * 8 * 10, rng);
    LossBuilder build = [&] { return reduce_weighted<double>(upsample_bilinear(x, 2), pw); };
    std::array<Var<double>, 1> wrt = {x};
    reports.push_back({"upsample_bilinear", finite_diff_max_rel_error(build, wrt)});
  }
  {  // downsample
    Var<double> x = random_tensor({2, 3, 8, 8}, rng, true);
    std::vector<double> pw = random_weights(2 * 3 * 4 * 4, rng);
    LossBuilder build = [&] { return reduce_weighted<double>(downsample_avg(x, 2), pw); };
    std::array<Var<double>, 1> wrt = {x};
    reports.push_back({"downsample_avg", finite_diff_max_rel_error(build, wrt)});
  }
  {  // normalize_channels; keep norms away from the eps branch
    Var<double> x = random_tensor({2, 3, 4, 4}, rng, true, 0.3, 1.0);
    std::vector<double> pw = random_weights(x->size(), rng);
    LossBuilder build = [&] { return reduce_weighted<double>(normalize_channels(x, 1e-8), pw); };
    std::array<Var<double>, 1> wrt = {x};
    reports.push_back({"normalize_channels", finite_diff_max_rel_error(build, wrt)});
  }
  {  // softmax cross entropy
    const int n = 2, c = 5, h = 6, w = 7;
    Var<double> logits = random_tensor({n, c, h, w}, rng, true, -2.0, 2.0);
    LabelBatch target{n, h, w, {}};
    std::uniform_int_distribution<int32_t> pick(0, c - 1);
    target.labels.resize(static_cast<size_t>(n) * h * w);
    for (int32_t& l : target.labels) l = pick(rng);
    MaskBatch mask = random_mask(n, h, w, rng);
    LossBuilder build = [&] { return softmax_cross_entropy(logits, target, &mask); };
    std::array<Var<double>, 1> wrt = {logits};
    reports.push_back({"softmax_cross_entropy", finite_diff_max_rel_error(build, wrt)});
  }
  {  // epe loss
    const int n = 2, h = 8, w = 9;
    Var<double> pred = random_tensor({n, 2, h, w}, rng, true, -3.0, 3.0);
    Var<double> gt = random_tensor({n, 2, h, w}, rng, false, -3.0, 3.0);
    MaskBatch mask = random_mask(n, h, w, rng);
    LossBuilder build = [&] { return epe_loss(pred, gt, mask); };
    std::array<Var<double>, 1> wrt = {pred};
    reports.push_back({"epe_loss", finite_diff_max_rel_error(build, wrt)});
  }
  {  // cosine normal loss; gt unit, pred away from zero
    const int n = 2, h = 6, w = 6;
    Var<double> pred = random_tensor({n, 3, h, w}, rng, true, 0.2, 1.0);
    Var<double> gt = random_tensor({n, 3, h, w}, rng, false, -1.0, 1.0);
    const size_t plane = static_cast<size_t>(h) * w;
    for (int i = 0; i < n; ++i) {
      double* g = gt->value.data() + static_cast<size_t>(i) * 3 * plane;
      for (size_t p = 0; p < plane; ++p) {
        double nx = g[p], ny = g[plane + p], nz = g[2 * plane + p];
        double norm = std::max(std::sqrt(nx * nx + ny * ny + nz * nz), 1e-3);
        g[p] = nx / norm;
        g[plane + p] = ny / norm;
        g[2 * plane + p] = nz / norm;
      }
    }
    MaskBatch mask = random_mask(n, h, w, rng);
    LossBuilder build = [&] { return cosine_normal_loss(pred, gt, mask); };
    std::array<Var<double>, 1> wrt = {pred};
    reports.push_back({"cosine_normal_loss", finite_diff_max_rel_error(build, wrt)});
  }
  {  // composite: conv -> relu -> upsample -> add residual -> epe
    const int n = 1, h = 8, w = 8;
    Var<double> base = random_tensor({n, 2, h, w}, rng, true, -1.0, 1.0);
    Var<double> x = random_tensor({n, 3, h / 2, w / 2}, rng, true);
    Var<double> wt = random_tensor({2, 3, 3, 3}, rng, true);
    Var<double> b = random_tensor({2}, rng, true);
    Var<double> gt = random_tensor({n, 2, h, w}, rng, false, -1.0, 1.0);
    MaskBatch mask = random_mask(n, h, w, rng);
    LossBuilder build = [&] {
      Var<double> y = upsample_bilinear(relu(conv2d(x, wt, b, 1, 1)), 2);
      return epe_loss(add(y, base), gt, mask);
    };
    std::array<Var<double>, 4> wrt = {base, x, wt, b};
    reports.push_back({"composite_residual", finite_diff_max_rel_error(build, wrt)});
  }

  return reports;
}

}  // namespace modref::nn
