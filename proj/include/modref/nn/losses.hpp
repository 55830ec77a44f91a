#pragma once

#include <cstdint>
#include <vector>

#include "modref/nn/tensor.hpp"

namespace modref::nn {

/// Per-pixel class targets for a batch, [N,H,W] row-major.
struct LabelBatch {
  int n = 0, h = 0, w = 0;
  std::vector<int32_t> labels;
};

/// Per-pixel validity for a batch, [N,H,W]; nonzero = pixel participates.
struct MaskBatch {
  int n = 0, h = 0, w = 0;
  std::vector<uint8_t> valid;
};

/// Smoothing constant inside the endpoint-error square root.
inline constexpr double kEpeEpsilon = 1e-6;

/// Mean over unmasked pixels of -log softmax(logits)[target]. Stabilized by
/// max subtraction. Pixels with label kLabelIgnore or zero mask are skipped;
/// an empty pixel set is an EvaluationError.
template <typename S>
Var<S> softmax_cross_entropy(const Var<S>& logits, const LabelBatch& target,
                             const MaskBatch* ignore_mask = nullptr);

/// Mean over valid pixels of sqrt(du^2 + dv^2 + eps^2); pred and gt are
/// [N,2,H,W].
template <typename S>
Var<S> epe_loss(const Var<S>& pred, const Var<S>& gt, const MaskBatch& valid);

/// Mean over valid pixels of 1 - <normalize(pred), gt>; pred and gt are
/// [N,3,H,W] with unit gt at valid pixels.
template <typename S>
Var<S> cosine_normal_loss(const Var<S>& pred, const Var<S>& gt, const MaskBatch& valid);

}  // namespace modref::nn
