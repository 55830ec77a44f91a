#include "modref/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace modref::metrics {

namespace {

void check_same_size(int pw, int ph, int gw, int gh, const char* what) {
  if (pw != gw || ph != gh) throw ShapeError(std::string(what) + ": size mismatch");
}

double angle_deg_between(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  dot = std::clamp(dot, -1.0, 1.0);
  return std::acos(dot) * 180.0 / std::numbers::pi;
}

// Returns the unit copy in double; deviation beyond tolerance is a
// validation error.
std::array<double, 3> unit_or_throw(const float* v, const char* what) {
  double norm = std::sqrt(static_cast<double>(v[0]) * v[0] + static_cast<double>(v[1]) * v[1] +
                          static_cast<double>(v[2]) * v[2]);
  if (std::abs(norm - 1.0) > 1e-3)
    throw ValidationError(std::string(what) + " normal norm deviates by more than 1e-3 (" +
                          std::to_string(norm) + ") at a valid pixel");
  return {v[0] / norm, v[1] / norm, v[2] / norm};
}

SegMetric metric_from_confusion(std::vector<int64_t> confusion, int classes) {
  SegMetric m;
  m.classes = classes;
  m.confusion = std::move(confusion);
  m.per_class_iou.assign(classes, -1.0);
  double sum = 0.0;
  int counted = 0;
  for (int c = 0; c < classes; ++c) {
    int64_t tp = m.confusion[static_cast<size_t>(c) * classes + c];
    int64_t fp = 0, fn = 0;
    for (int k = 0; k < classes; ++k) {
      if (k == c) continue;
      fp += m.confusion[static_cast<size_t>(k) * classes + c];
      fn += m.confusion[static_cast<size_t>(c) * classes + k];
    }
    int64_t uni = tp + fp + fn;
    if (uni == 0) continue;  // class absent from both gt and pred
    m.per_class_iou[c] = 100.0 * static_cast<double>(tp) / static_cast<double>(uni);
    sum += m.per_class_iou[c];
    ++counted;
  }
  if (counted == 0) throw EvaluationError("mIoU undefined: no class has nonzero union");
  m.miou = sum / counted;
  for (int64_t v : m.confusion) m.pixel_count += v;
  return m;
}

}  // namespace

FlowMetric eval_flow(const FlowField& pred, const FlowField& gt, const GrayImage& valid) {
  check_same_size(pred.width, pred.height, gt.width, gt.height, "flow");
  check_same_size(valid.width, valid.height, gt.width, gt.height, "flow mask");
  double acc = 0.0;
  int64_t count = 0;
  for (int y = 0; y < gt.height; ++y) {
    for (int x = 0; x < gt.width; ++x) {
      if (!valid.at(x, y)) continue;
      const double du = static_cast<double>(pred.u(x, y)) - gt.u(x, y);
      const double dv = static_cast<double>(pred.v(x, y)) - gt.v(x, y);
      acc += std::sqrt(du * du + dv * dv);
      ++count;
    }
  }
  if (count == 0) throw EvaluationError("endpoint error undefined: empty valid mask");
  return {acc / static_cast<double>(count), count};
}

SegMetric eval_seg(const LabelMap& pred, const LabelMap& gt, int class_count, int ignore_label) {
  check_same_size(pred.width, pred.height, gt.width, gt.height, "segmentation");
  if (class_count < 2) throw ConfigError("segmentation needs at least 2 classes");
  std::vector<int64_t> confusion(static_cast<size_t>(class_count) * class_count, 0);
  int64_t counted = 0;
  for (int y = 0; y < gt.height; ++y) {
    for (int x = 0; x < gt.width; ++x) {
      const int32_t g = gt.at(x, y);
      const int32_t p = pred.at(x, y);
      if (g == ignore_label) continue;
      if (g < 0 || g >= class_count)
        throw RangeError("gt label " + std::to_string(g) + " not below class count");
      if (p == ignore_label) continue;
      if (p < 0 || p >= class_count)
        throw RangeError("pred label " + std::to_string(p) + " not below class count");
      ++confusion[static_cast<size_t>(g) * class_count + p];
      ++counted;
    }
  }
  if (counted == 0) throw EvaluationError("mIoU undefined: all pixels ignored");
  return metric_from_confusion(std::move(confusion), class_count);
}

SegMetric eval_seg(const ScoreMap& pred, const LabelMap& gt, int ignore_label) {
  LabelMap hard(pred.width, pred.height);
  for (int y = 0; y < pred.height; ++y)
    for (int x = 0; x < pred.width; ++x) hard.at(x, y) = pred.argmax(x, y);
  return eval_seg(hard, gt, pred.classes, ignore_label);
}

NormalMetric normal_metric_from_angles(std::vector<double> angles_deg) {
  if (angles_deg.empty()) throw EvaluationError("normal metric undefined: empty valid mask");
  // full sort: exact selection for the median and an accumulation order
  // independent of frame insertion order
  std::sort(angles_deg.begin(), angles_deg.end());
  NormalMetric m;
  m.pixel_count = static_cast<int64_t>(angles_deg.size());
  double sum = 0.0, sum2 = 0.0;
  int64_t under_11 = 0, under_22 = 0, under_30 = 0;
  for (double a : angles_deg) {
    sum += a;
    sum2 += a * a;
    if (a < 11.25) ++under_11;
    if (a < 22.5) ++under_22;
    if (a < 30.0) ++under_30;
  }
  const double n = static_cast<double>(angles_deg.size());
  m.mean_deg = sum / n;
  m.rmse_deg = std::sqrt(sum2 / n);
  m.median_deg = angles_deg[(angles_deg.size() - 1) / 2];  // lower median
  m.pct_11_25 = 100.0 * static_cast<double>(under_11) / n;
  m.pct_22_5 = 100.0 * static_cast<double>(under_22) / n;
  m.pct_30 = 100.0 * static_cast<double>(under_30) / n;
  return m;
}

NormalMetric eval_normals(const NormalMap& pred, const NormalMap& gt, const GrayImage& valid) {
  NormalAccumulator acc;
  acc.add(pred, gt, valid);
  return acc.metric();
}

void NormalAccumulator::add(const NormalMap& pred, const NormalMap& gt, const GrayImage& valid) {
  check_same_size(pred.width, pred.height, gt.width, gt.height, "normals");
  check_same_size(valid.width, valid.height, gt.width, gt.height, "normals mask");
  for (int y = 0; y < gt.height; ++y) {
    for (int x = 0; x < gt.width; ++x) {
      if (!valid.at(x, y)) continue;
      std::array<double, 3> p = unit_or_throw(pred.at(x, y), "predicted");
      std::array<double, 3> g = unit_or_throw(gt.at(x, y), "ground-truth");
      angles_deg_.push_back(angle_deg_between(p, g));
    }
  }
}

NormalMetric NormalAccumulator::metric() const { return normal_metric_from_angles(angles_deg_); }

FlowMetric aggregate_flow(std::span<const FlowMetric> frames) {
  if (frames.empty()) throw EvaluationError("aggregate of zero frames");
  double acc = 0.0;
  int64_t count = 0;
  for (const FlowMetric& f : frames) {
    acc += f.epe * static_cast<double>(f.pixel_count);
    count += f.pixel_count;
  }
  if (count == 0) throw EvaluationError("aggregate flow metric over zero pixels");
  return {acc / static_cast<double>(count), count};
}

SegMetric aggregate_seg(std::span<const SegMetric> frames) {
  if (frames.empty()) throw EvaluationError("aggregate of zero frames");
  const int classes = frames.front().classes;
  std::vector<int64_t> confusion(static_cast<size_t>(classes) * classes, 0);
  for (const SegMetric& f : frames) {
    if (f.classes != classes) throw ShapeError("aggregate_seg: class count mismatch");
    for (size_t i = 0; i < confusion.size(); ++i) confusion[i] += f.confusion[i];
  }
  return metric_from_confusion(std::move(confusion), classes);
}

}  // namespace modref::metrics
