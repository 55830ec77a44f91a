#include "modref/nn/losses.hpp"

#include <cmath>

#include "modref/image.hpp"

namespace modref::nn {

namespace {

template <typename S>
void check_batch_dims(const Var<S>& t, int n, int h, int w, const char* what) {
  if (t->shape.size() != 4 || t->shape[0] != n || t->shape[2] != h || t->shape[3] != w)
    throw ShapeError(std::string(what) + " shape does not match target batch");
}

}  // namespace

template <typename S>
Var<S> softmax_cross_entropy(const Var<S>& logits, const LabelBatch& target,
                             const MaskBatch* ignore_mask) {
  check_batch_dims(logits, target.n, target.h, target.w, "logits");
  const int n = target.n, c = logits->shape[1], h = target.h, w = target.w;
  const size_t plane = static_cast<size_t>(h) * w;

  auto included = [&](size_t px) {
    if (target.labels[px] == kLabelIgnore) return false;
    if (ignore_mask && !ignore_mask->valid[px]) return false;
    return true;
  };

  size_t count = 0;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const S* base = logits->value.data() + static_cast<size_t>(i) * c * plane;
    for (size_t p = 0; p < plane; ++p) {
      const size_t px = static_cast<size_t>(i) * plane + p;
      if (!included(px)) continue;
      const int32_t label = target.labels[px];
      if (label < 0 || label >= c)
        throw RangeError("target label " + std::to_string(label) + " not below class count " +
                         std::to_string(c));
      S maxv = base[p];
      for (int ch = 1; ch < c; ++ch) maxv = std::max(maxv, base[ch * plane + p]);
      double lse = 0.0;
      for (int ch = 0; ch < c; ++ch) lse += std::exp(static_cast<double>(base[ch * plane + p] - maxv));
      lse = std::log(lse) + static_cast<double>(maxv);
      acc += lse - static_cast<double>(base[static_cast<size_t>(label) * plane + p]);
      ++count;
    }
  }
  if (count == 0) throw EvaluationError("cross entropy undefined: all pixels masked");

  auto out = std::make_shared<Node<S>>();
  out->shape = {1};
  out->value = {static_cast<S>(acc / static_cast<double>(count))};
  out->inputs = {logits};
  out->requires_grad = logits->requires_grad;
  if (out->requires_grad) {
    LabelBatch tgt = target;
    MaskBatch mask = ignore_mask ? *ignore_mask : MaskBatch{};
    const bool has_mask = ignore_mask != nullptr;
    out->backward_fn = [tgt = std::move(tgt), mask = std::move(mask), has_mask, n, c, plane,
                        count](Node<S>& node) {
      Var<S> lg = node.inputs[0];
      if (!lg->requires_grad) return;
      const S g = node.grad[0] / static_cast<S>(count);
      std::vector<double> soft(c);
      for (int i = 0; i < n; ++i) {
        const S* base = lg->value.data() + static_cast<size_t>(i) * c * plane;
        S* gbase = lg->grad.data() + static_cast<size_t>(i) * c * plane;
        for (size_t p = 0; p < plane; ++p) {
          const size_t px = static_cast<size_t>(i) * plane + p;
          if (tgt.labels[px] == kLabelIgnore) continue;
          if (has_mask && !mask.valid[px]) continue;
          S maxv = base[p];
          for (int ch = 1; ch < c; ++ch) maxv = std::max(maxv, base[ch * plane + p]);
          double denom = 0.0;
          for (int ch = 0; ch < c; ++ch) {
            soft[ch] = std::exp(static_cast<double>(base[ch * plane + p] - maxv));
            denom += soft[ch];
          }
          for (int ch = 0; ch < c; ++ch) {
            double sm = soft[ch] / denom;
            double onehot = (ch == tgt.labels[px]) ? 1.0 : 0.0;
            gbase[ch * plane + p] += g * static_cast<S>(sm - onehot);
          }
        }
      }
    };
  }
  return out;
}

template <typename S>
Var<S> epe_loss(const Var<S>& pred, const Var<S>& gt, const MaskBatch& valid) {
  check_batch_dims(pred, valid.n, valid.h, valid.w, "flow prediction");
  check_batch_dims(gt, valid.n, valid.h, valid.w, "flow ground truth");
  if (pred->shape[1] != 2 || gt->shape[1] != 2) throw ShapeError("flow tensors must have 2 channels");
  const int n = valid.n, h = valid.h, w = valid.w;
  const size_t plane = static_cast<size_t>(h) * w;
  const double eps2 = kEpeEpsilon * kEpeEpsilon;

  size_t count = 0;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const S* pu = pred->value.data() + static_cast<size_t>(i) * 2 * plane;
    const S* pv = pu + plane;
    const S* gu = gt->value.data() + static_cast<size_t>(i) * 2 * plane;
    const S* gv = gu + plane;
    for (size_t p = 0; p < plane; ++p) {
      if (!valid.valid[static_cast<size_t>(i) * plane + p]) continue;
      const double du = static_cast<double>(pu[p]) - static_cast<double>(gu[p]);
      const double dv = static_cast<double>(pv[p]) - static_cast<double>(gv[p]);
      acc += std::sqrt(du * du + dv * dv + eps2);
      ++count;
    }
  }
  if (count == 0) throw EvaluationError("endpoint error undefined: empty valid mask");

  auto out = std::make_shared<Node<S>>();
  out->shape = {1};
  out->value = {static_cast<S>(acc / static_cast<double>(count))};
  out->inputs = {pred, gt};
  out->requires_grad = pred->requires_grad || gt->requires_grad;
  if (out->requires_grad) {
    MaskBatch mask = valid;
    out->backward_fn = [mask = std::move(mask), n, plane, count, eps2](Node<S>& node) {
      Var<S> pr = node.inputs[0];
      Var<S> gtv = node.inputs[1];
      if (!pr->requires_grad) return;
      const S g = node.grad[0] / static_cast<S>(count);
      for (int i = 0; i < n; ++i) {
        const S* pu = pr->value.data() + static_cast<size_t>(i) * 2 * plane;
        const S* pv = pu + plane;
        const S* gu = gtv->value.data() + static_cast<size_t>(i) * 2 * plane;
        const S* gv = gu + plane;
        S* du_g = pr->grad.data() + static_cast<size_t>(i) * 2 * plane;
        S* dv_g = du_g + plane;
        for (size_t p = 0; p < plane; ++p) {
          if (!mask.valid[static_cast<size_t>(i) * plane + p]) continue;
          const double du = static_cast<double>(pu[p]) - static_cast<double>(gu[p]);
          const double dv = static_cast<double>(pv[p]) - static_cast<double>(gv[p]);
          const double d = std::sqrt(du * du + dv * dv + eps2);
          du_g[p] += g * static_cast<S>(du / d);
          dv_g[p] += g * static_cast<S>(dv / d);
        }
      }
    };
  }
  return out;
}

template <typename S>
Var<S> cosine_normal_loss(const Var<S>& pred, const Var<S>& gt, const MaskBatch& valid) {
  check_batch_dims(pred, valid.n, valid.h, valid.w, "normal prediction");
  check_batch_dims(gt, valid.n, valid.h, valid.w, "normal ground truth");
  if (pred->shape[1] != 3 || gt->shape[1] != 3)
    throw ShapeError("normal tensors must have 3 channels");
  const int n = valid.n, h = valid.h, w = valid.w;
  const size_t plane = static_cast<size_t>(h) * w;
  constexpr double kNormEps = 1e-8;

  size_t count = 0;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const S* pb = pred->value.data() + static_cast<size_t>(i) * 3 * plane;
    const S* gb = gt->value.data() + static_cast<size_t>(i) * 3 * plane;
    for (size_t p = 0; p < plane; ++p) {
      if (!valid.valid[static_cast<size_t>(i) * plane + p]) continue;
      double vx = pb[p], vy = pb[plane + p], vz = pb[2 * plane + p];
      double norm = std::sqrt(vx * vx + vy * vy + vz * vz);
      norm = std::max(norm, kNormEps);
      double dot = (vx * gb[p] + vy * gb[plane + p] + vz * gb[2 * plane + p]) / norm;
      acc += 1.0 - dot;
      ++count;
    }
  }
  if (count == 0) throw EvaluationError("cosine loss undefined: empty valid mask");

  auto out = std::make_shared<Node<S>>();
  out->shape = {1};
  out->value = {static_cast<S>(acc / static_cast<double>(count))};
  out->inputs = {pred, gt};
  out->requires_grad = pred->requires_grad || gt->requires_grad;
  if (out->requires_grad) {
    MaskBatch mask = valid;
    out->backward_fn = [mask = std::move(mask), n, plane, count](Node<S>& node) {
      Var<S> pr = node.inputs[0];
      Var<S> gtv = node.inputs[1];
      if (!pr->requires_grad) return;
      const double g = static_cast<double>(node.grad[0]) / static_cast<double>(count);
      for (int i = 0; i < n; ++i) {
        const S* pb = pr->value.data() + static_cast<size_t>(i) * 3 * plane;
        const S* gb = gtv->value.data() + static_cast<size_t>(i) * 3 * plane;
        S* dg = pr->grad.data() + static_cast<size_t>(i) * 3 * plane;
        for (size_t p = 0; p < plane; ++p) {
          if (!mask.valid[static_cast<size_t>(i) * plane + p]) continue;
          double v[3] = {static_cast<double>(pb[p]), static_cast<double>(pb[plane + p]),
                         static_cast<double>(pb[2 * plane + p])};
          double t[3] = {static_cast<double>(gb[p]), static_cast<double>(gb[plane + p]),
                         static_cast<double>(gb[2 * plane + p])};
          double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
          norm = std::max(norm, 1e-8);
          double nvec[3] = {v[0] / norm, v[1] / norm, v[2] / norm};
          double ndott = nvec[0] * t[0] + nvec[1] * t[1] + nvec[2] * t[2];
          // d(1 - <v/||v||, t>)/dv = -(t - n<n,t>)/||v||
          for (int ch = 0; ch < 3; ++ch)
            dg[ch * plane + p] += static_cast<S>(-g * (t[ch] - nvec[ch] * ndott) / norm);
        }
      }
    };
  }
  return out;
}

#define MODREF_INSTANTIATE_LOSSES(S)                                                     \
  template Var<S> softmax_cross_entropy(const Var<S>&, const LabelBatch&, const MaskBatch*); \
  template Var<S> epe_loss(const Var<S>&, const Var<S>&, const MaskBatch&);              \
  template Var<S> cosine_normal_loss(const Var<S>&, const Var<S>&, const MaskBatch&);

MODREF_INSTANTIATE_LOSSES(float)
MODREF_INSTANTIATE_LOSSES(double)

#undef MODREF_INSTANTIATE_LOSSES

}  // namespace modref::nn
