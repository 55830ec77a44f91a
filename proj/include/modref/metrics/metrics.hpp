#pragma once

#include <span>
#include <vector>

#include "modref/image.hpp"

namespace modref::metrics {

/// Mean endpoint error in pixels over valid pixels.
struct FlowMetric {
  double epe = 0.0;
  int64_t pixel_count = 0;
};

/// Per-class IoU and mean IoU in percent plus the pooled confusion matrix
/// (row = ground truth class, column = predicted class). Classes with zero
/// union carry iou -1 and are excluded from the mean.
struct SegMetric {
  int classes = 0;
  std::vector<double> per_class_iou;
  double miou = 0.0;
  std::vector<int64_t> confusion;
  int64_t pixel_count = 0;
};

/// Angular statistics in degrees over valid pixels. Threshold percentages
/// use strict "<". Median is exact selection; even counts take the lower of
/// the two middle values.
struct NormalMetric {
  double mean_deg = 0.0;
  double median_deg = 0.0;
  double rmse_deg = 0.0;
  double pct_11_25 = 0.0;
  double pct_22_5 = 0.0;
  double pct_30 = 0.0;
  int64_t pixel_count = 0;
};

FlowMetric eval_flow(const FlowField& pred, const FlowField& gt, const GrayImage& valid);

SegMetric eval_seg(const LabelMap& pred, const LabelMap& gt, int class_count,
                   int ignore_label = kLabelIgnore);
SegMetric eval_seg(const ScoreMap& pred, const LabelMap& gt, int ignore_label = kLabelIgnore);

/// Unit-norm inputs are required at valid pixels: deviations up to 1e-3 are
/// renormalized away, larger ones raise ValidationError.
NormalMetric eval_normals(const NormalMap& pred, const NormalMap& gt, const GrayImage& valid);

/// Dataset-level pooling: pixel-count weighted for flow, one global
/// confusion matrix for segmentation.
FlowMetric aggregate_flow(std::span<const FlowMetric> frames);
SegMetric aggregate_seg(std::span<const SegMetric> frames);

/// Pools per-pixel angles across frames so the dataset median is exact.
class NormalAccumulator {
 public:
  void add(const NormalMap& pred, const NormalMap& gt, const GrayImage& valid);
  NormalMetric metric() const;
  bool empty() const { return angles_deg_.empty(); }

 private:
  std::vector<double> angles_deg_;
};

/// Computes the six normal statistics from a pooled angle sample.
NormalMetric normal_metric_from_angles(std::vector<double> angles_deg);

}  // namespace modref::metrics
