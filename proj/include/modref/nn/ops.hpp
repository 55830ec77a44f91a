#pragma once

#include <span>

#include "modref/nn/tensor.hpp"

namespace modref::nn {

/// 2D cross-correlation over [N,Cin,H,W] with weight [Cout,Cin,k,k] and
/// bias [Cout]. Output spatial size (H + 2*padding - k)/stride + 1; the
/// division must be exact or a ConfigError is thrown. Exact gradients for
/// input, weight, and bias.
template <typename S>
Var<S> conv2d(const Var<S>& input, const Var<S>& weight, const Var<S>& bias, int stride = 1,
              int padding = 0);

/// max(0, x); subgradient 0 at 0.
template <typename S>
Var<S> relu(const Var<S>& x);

/// Concatenate along the channel axis; inputs agree on N,H,W. The backward
/// rule splits the upstream gradient exactly.
template <typename S>
Var<S> concat_channels(std::span<const Var<S>> xs);

/// Bilinear upsample by an integer factor, align-corners-false convention.
template <typename S>
Var<S> upsample_bilinear(const Var<S>& x, int factor);

/// Average every factor x factor block. H and W must be divisible.
template <typename S>
Var<S> downsample_avg(const Var<S>& x, int factor);

template <typename S>
Var<S> add(const Var<S>& a, const Var<S>& b);

template <typename S>
Var<S> scale(const Var<S>& x, S k);

/// Scalar <x, weights>; the projection used to gradient-check multi-output ops.
template <typename S>
Var<S> reduce_weighted(const Var<S>& x, std::span<const S> weights);

/// L2-normalize across channels per (n, y, x) position. Vectors with norm
/// below `eps` pass through unchanged (preserves invalid-pixel markers).
template <typename S>
Var<S> normalize_channels(const Var<S>& x, S eps = S(1e-8));

}  // namespace modref::nn
