#include "modref/nn/ops.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace modref::nn {

namespace {

template <typename S>
using MatRM = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using MapM = Eigen::Map<MatRM<S>>;
template <typename S>
using MapCM = Eigen::Map<const MatRM<S>>;

void check_rank4(const std::vector<int>& shape, const char* what) {
  if (shape.size() != 4) throw ShapeError(std::string(what) + " must be rank 4 [N,C,H,W]");
}

// Scatter one sample [Cin,H,W] into a [Cin*k*k, Ho*Wo] patch matrix.
template <typename S>
void im2col(const S* src, S* col, int cin, int h, int w, int k, int stride, int pad, int ho,
            int wo) {
  const size_t cols = static_cast<size_t>(ho) * wo;
  for (int ci = 0; ci < cin; ++ci) {
    const S* plane = src + static_cast<size_t>(ci) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        S* row = col + (static_cast<size_t>(ci) * k * k + static_cast<size_t>(ky) * k + kx) * cols;
        for (int oy = 0; oy < ho; ++oy) {
          int iy = oy * stride + ky - pad;
          S* dst = row + static_cast<size_t>(oy) * wo;
          if (iy < 0 || iy >= h) {
            std::fill(dst, dst + wo, S(0));
            continue;
          }
          const S* srow = plane + static_cast<size_t>(iy) * w;
          for (int ox = 0; ox < wo; ++ox) {
            int ix = ox * stride + kx - pad;
            dst[ox] = (ix >= 0 && ix < w) ? srow[ix] : S(0);
          }
        }
      }
    }
  }
}

template <typename S>
void col2im_add(const S* col, S* dst, int cin, int h, int w, int k, int stride, int pad, int ho,
                int wo) {
  const size_t cols = static_cast<size_t>(ho) * wo;
  for (int ci = 0; ci < cin; ++ci) {
    S* plane = dst + static_cast<size_t>(ci) * h * w;
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const S* row =
            col + (static_cast<size_t>(ci) * k * k + static_cast<size_t>(ky) * k + kx) * cols;
        for (int oy = 0; oy < ho; ++oy) {
          int iy = oy * stride + ky - pad;
          if (iy < 0 || iy >= h) continue;
          S* drow = plane + static_cast<size_t>(iy) * w;
          const S* srow = row + static_cast<size_t>(oy) * wo;
          for (int ox = 0; ox < wo; ++ox) {
            int ix = ox * stride + kx - pad;
            if (ix >= 0 && ix < w) drow[ix] += srow[ox];
          }
        }
      }
    }
  }
}

struct AxisTable {
  std::vector<int> i0, i1;
  std::vector<double> w1;  // weight of i1; i0 gets 1-w1
};

AxisTable bilinear_table(int out_size, int in_size, int factor) {
  AxisTable t;
  t.i0.resize(out_size);
  t.i1.resize(out_size);
  t.w1.resize(out_size);
  for (int o = 0; o < out_size; ++o) {
    double src = (o + 0.5) / factor - 0.5;
    int lo = static_cast<int>(std::floor(src));
    double w = src - lo;
    t.i0[o] = std::clamp(lo, 0, in_size - 1);
    t.i1[o] = std::clamp(lo + 1, 0, in_size - 1);
    t.w1[o] = w;
  }
  return t;
}

}  // namespace

template <typename S>
Var<S> conv2d(const Var<S>& input, const Var<S>& weight, const Var<S>& bias, int stride,
              int padding) {
  check_rank4(input->shape, "conv2d input");
  check_rank4(weight->shape, "conv2d weight");
  if (bias->shape.size() != 1) throw ShapeError("conv2d bias must be rank 1");
  const int n = input->shape[0], cin = input->shape[1], h = input->shape[2], w = input->shape[3];
  const int cout = weight->shape[0], k = weight->shape[2];
  if (weight->shape[1] != cin) throw ShapeError("conv2d weight channel mismatch");
  if (weight->shape[3] != k) throw ShapeError("conv2d kernel must be square");
  if (bias->shape[0] != cout) throw ShapeError("conv2d bias size mismatch");
  if (k % 2 == 0) throw ConfigError("conv2d kernel size must be odd");
  if (stride < 1 || padding < 0) throw ConfigError("conv2d invalid stride/padding");
  if ((h + 2 * padding - k) % stride != 0 || (w + 2 * padding - k) % stride != 0)
    throw ConfigError("conv2d output size is not integral for this stride/padding");
  const int ho = (h + 2 * padding - k) / stride + 1;
  const int wo = (w + 2 * padding - k) / stride + 1;
  if (ho < 1 || wo < 1) throw ConfigError("conv2d output would be empty");

  auto out = std::make_shared<Node<S>>();
  out->shape = {n, cout, ho, wo};
  out->value.resize(static_cast<size_t>(n) * cout * ho * wo);
  out->inputs = {input, weight, bias};
  out->requires_grad = input->requires_grad || weight->requires_grad || bias->requires_grad;

  const size_t ckk = static_cast<size_t>(cin) * k * k;
  const size_t spatial = static_cast<size_t>(ho) * wo;
  const size_t in_stride = static_cast<size_t>(cin) * h * w;
  const size_t out_stride = static_cast<size_t>(cout) * spatial;

  {
    std::vector<S> col(ckk * spatial);
    MapCM<S> wm(weight->value.data(), cout, static_cast<Eigen::Index>(ckk));
    for (int i = 0; i < n; ++i) {
      im2col(input->value.data() + i * in_stride, col.data(), cin, h, w, k, stride, padding, ho,
             wo);
      MapCM<S> cm(col.data(), static_cast<Eigen::Index>(ckk), static_cast<Eigen::Index>(spatial));
      MapM<S> om(out->value.data() + i * out_stride, cout, static_cast<Eigen::Index>(spatial));
      om.noalias() = wm * cm;
      for (int co = 0; co < cout; ++co) om.row(co).array() += bias->value[co];
    }
  }

  if (out->requires_grad) {
    const int cin_c = cin, h_c = h, w_c = w, k_c = k, stride_c = stride, pad_c = padding,
              ho_c = ho, wo_c = wo, n_c = n, cout_c = cout;
    out->backward_fn = [=](Node<S>& node) {
      Var<S> x = node.inputs[0], wt = node.inputs[1], b = node.inputs[2];
      const size_t ckk2 = static_cast<size_t>(cin_c) * k_c * k_c;
      const size_t spatial2 = static_cast<size_t>(ho_c) * wo_c;
      const size_t in_s = static_cast<size_t>(cin_c) * h_c * w_c;
      const size_t out_s = static_cast<size_t>(cout_c) * spatial2;
      std::vector<S> col(ckk2 * spatial2);
      std::vector<S> dcol;
      if (x->requires_grad) dcol.resize(ckk2 * spatial2);
      MapCM<S> wm(wt->value.data(), cout_c, static_cast<Eigen::Index>(ckk2));
      for (int i = 0; i < n_c; ++i) {
        MapCM<S> go(node.grad.data() + i * out_s, cout_c, static_cast<Eigen::Index>(spatial2));
        if (wt->requires_grad || x->requires_grad)
          im2col(x->value.data() + i * in_s, col.data(), cin_c, h_c, w_c, k_c, stride_c, pad_c,
                 ho_c, wo_c);
        if (wt->requires_grad) {
          MapCM<S> cm(col.data(), static_cast<Eigen::Index>(ckk2),
                      static_cast<Eigen::Index>(spatial2));
          MapM<S> gw(wt->grad.data(), cout_c, static_cast<Eigen::Index>(ckk2));
          gw.noalias() += go * cm.transpose();
        }
        if (b->requires_grad)
          for (int co = 0; co < cout_c; ++co) b->grad[co] += go.row(co).sum();
        if (x->requires_grad) {
          MapM<S> dc(dcol.data(), static_cast<Eigen::Index>(ckk2),
                     static_cast<Eigen::Index>(spatial2));
          dc.noalias() = wm.transpose() * go;
          col2im_add(dcol.data(), x->grad.data() + i * in_s, cin_c, h_c, w_c, k_c, stride_c, pad_c,
                     ho_c, wo_c);
        }
      }
    };
  }
  return out;
}

template <typename S>
Var<S> relu(const Var<S>& x) {
  auto out = std::make_shared<Node<S>>();
  out->shape = x->shape;
  out->value.resize(x->size());
  for (size_t i = 0; i < x->size(); ++i) out->value[i] = x->value[i] > S(0) ? x->value[i] : S(0);
  out->inputs = {x};
  out->requires_grad = x->requires_grad;
  if (out->requires_grad) {
    out->backward_fn = [](Node<S>& node) {
      Var<S> in = node.inputs[0];
      if (!in->requires_grad) return;
      for (size_t i = 0; i < node.grad.size(); ++i)
        if (in->value[i] > S(0)) in->grad[i] += node.grad[i];
    };
  }
  return out;
}

template <typename S>
Var<S> concat_channels(std::span<const Var<S>> xs) {
  if (xs.empty()) throw ShapeError("concat of zero tensors");
  check_rank4(xs[0]->shape, "concat input");
  const int n = xs[0]->shape[0], h = xs[0]->shape[2], w = xs[0]->shape[3];
  int total_c = 0;
  for (const Var<S>& x : xs) {
    check_rank4(x->shape, "concat input");
    if (x->shape[0] != n || x->shape[2] != h || x->shape[3] != w)
      throw ShapeError("concat inputs disagree on N/H/W");
    total_c += x->shape[1];
  }

  auto out = std::make_shared<Node<S>>();
  out->shape = {n, total_c, h, w};
  out->value.resize(static_cast<size_t>(n) * total_c * h * w);
  out->inputs.assign(xs.begin(), xs.end());
  for (const Var<S>& x : xs) out->requires_grad = out->requires_grad || x->requires_grad;

  const size_t plane = static_cast<size_t>(h) * w;
  for (int i = 0; i < n; ++i) {
    size_t c_off = 0;
    for (const Var<S>& x : xs) {
      const size_t cnt = static_cast<size_t>(x->shape[1]) * plane;
      std::copy_n(x->value.data() + i * cnt, cnt,
                  out->value.data() + (static_cast<size_t>(i) * total_c + c_off) * plane);
      c_off += x->shape[1];
    }
  }

  if (out->requires_grad) {
    const int n_c = n, total = total_c;
    out->backward_fn = [n_c, total, plane](Node<S>& node) {
      for (int i = 0; i < n_c; ++i) {
        size_t c_off = 0;
        for (const Var<S>& x : node.inputs) {
          const size_t cnt = static_cast<size_t>(x->shape[1]) * plane;
          if (x->requires_grad) {
            const S* src = node.grad.data() + (static_cast<size_t>(i) * total + c_off) * plane;
            S* dst = x->grad.data() + i * cnt;
            for (size_t j = 0; j < cnt; ++j) dst[j] += src[j];
          }
          c_off += x->shape[1];
        }
      }
    };
  }
  return out;
}

template <typename S>
Var<S> upsample_bilinear(const Var<S>& x, int factor) {
  check_rank4(x->shape, "upsample input");
  if (factor < 1) throw ConfigError("upsample factor must be >= 1");
  const int n = x->shape[0], c = x->shape[1], h = x->shape[2], w = x->shape[3];
  const int ho = h * factor, wo = w * factor;
  AxisTable ty = bilinear_table(ho, h, factor);
  AxisTable tx = bilinear_table(wo, w, factor);

  auto out = std::make_shared<Node<S>>();
  out->shape = {n, c, ho, wo};
  out->value.resize(static_cast<size_t>(n) * c * ho * wo);
  out->inputs = {x};
  out->requires_grad = x->requires_grad;

  const size_t planes = static_cast<size_t>(n) * c;
  for (size_t p = 0; p < planes; ++p) {
    const S* src = x->value.data() + p * h * w;
    S* dst = out->value.data() + p * ho * wo;
    for (int oy = 0; oy < ho; ++oy) {
      const S* r0 = src + static_cast<size_t>(ty.i0[oy]) * w;
      const S* r1 = src + static_cast<size_t>(ty.i1[oy]) * w;
      const S wy = static_cast<S>(ty.w1[oy]);
      S* drow = dst + static_cast<size_t>(oy) * wo;
      for (int ox = 0; ox < wo; ++ox) {
        const S wx = static_cast<S>(tx.w1[ox]);
        const S v0 = r0[tx.i0[ox]] * (S(1) - wx) + r0[tx.i1[ox]] * wx;
        const S v1 = r1[tx.i0[ox]] * (S(1) - wx) + r1[tx.i1[ox]] * wx;
        drow[ox] = v0 * (S(1) - wy) + v1 * wy;
      }
    }
  }

  if (out->requires_grad) {
    out->backward_fn = [ty, tx, h, w, ho, wo, planes](Node<S>& node) {
      Var<S> in = node.inputs[0];
      if (!in->requires_grad) return;
      for (size_t p = 0; p < planes; ++p) {
        S* dsrc = in->grad.data() + p * h * w;
        const S* g = node.grad.data() + p * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
          const S wy = static_cast<S>(ty.w1[oy]);
          S* g0 = dsrc + static_cast<size_t>(ty.i0[oy]) * w;
          S* g1 = dsrc + static_cast<size_t>(ty.i1[oy]) * w;
          const S* grow = g + static_cast<size_t>(oy) * wo;
          for (int ox = 0; ox < wo; ++ox) {
            const S wx = static_cast<S>(tx.w1[ox]);
            const S gv = grow[ox];
            g0[tx.i0[ox]] += gv * (S(1) - wy) * (S(1) - wx);
            g0[tx.i1[ox]] += gv * (S(1) - wy) * wx;
            g1[tx.i0[ox]] += gv * wy * (S(1) - wx);
            g1[tx.i1[ox]] += gv * wy * wx;
          }
        }
      }
    };
  }
  return out;
}

template <typename S>
Var<S> downsample_avg(const Var<S>& x, int factor) {
  check_rank4(x->shape, "downsample input");
  if (factor < 1) throw ConfigError("downsample factor must be >= 1");
  const int n = x->shape[0], c = x->shape[1], h = x->shape[2], w = x->shape[3];
  if (h % factor != 0 || w % factor != 0)
    throw ShapeError("downsample requires dimensions divisible by the factor");
  const int ho = h / factor, wo = w / factor;

  auto out = std::make_shared<Node<S>>();
  out->shape = {n, c, ho, wo};
  out->value.assign(static_cast<size_t>(n) * c * ho * wo, S(0));
  out->inputs = {x};
  out->requires_grad = x->requires_grad;

  const S inv = S(1) / (S(factor) * S(factor));
  const size_t planes = static_cast<size_t>(n) * c;
  for (size_t p = 0; p < planes; ++p) {
    const S* src = x->value.data() + p * h * w;
    S* dst = out->value.data() + p * ho * wo;
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox) {
        S acc = S(0);
        for (int dy = 0; dy < factor; ++dy) {
          const S* row = src + (static_cast<size_t>(oy) * factor + dy) * w + ox * factor;
          for (int dx = 0; dx < factor; ++dx) acc += row[dx];
        }
        dst[static_cast<size_t>(oy) * wo + ox] = acc * inv;
      }
  }

  if (out->requires_grad) {
    out->backward_fn = [h, w, ho, wo, factor, inv, planes](Node<S>& node) {
      Var<S> in = node.inputs[0];
      if (!in->requires_grad) return;
      for (size_t p = 0; p < planes; ++p) {
        S* dsrc = in->grad.data() + p * h * w;
        const S* g = node.grad.data() + p * ho * wo;
        for (int oy = 0; oy < ho; ++oy)
          for (int ox = 0; ox < wo; ++ox) {
            const S gv = g[static_cast<size_t>(oy) * wo + ox] * inv;
            for (int dy = 0; dy < factor; ++dy) {
              S* row = dsrc + (static_cast<size_t>(oy) * factor + dy) * w + ox * factor;
              for (int dx = 0; dx < factor; ++dx) row[dx] += gv;
            }
          }
      }
    };
  }
  return out;
}

template <typename S>
Var<S> add(const Var<S>& a, const Var<S>& b) {
  if (a->shape != b->shape) throw ShapeError("add shape mismatch");
  auto out = std::make_shared<Node<S>>();
  out->shape = a->shape;
  out->value.resize(a->size());
  for (size_t i = 0; i < a->size(); ++i) out->value[i] = a->value[i] + b->value[i];
  out->inputs = {a, b};
  out->requires_grad = a->requires_grad || b->requires_grad;
  if (out->requires_grad) {
    out->backward_fn = [](Node<S>& node) {
      for (const Var<S>& in : node.inputs)
        if (in->requires_grad)
          for (size_t i = 0; i < node.grad.size(); ++i) in->grad[i] += node.grad[i];
    };
  }
  return out;
}

template <typename S>
Var<S> scale(const Var<S>& x, S k) {
  auto out = std::make_shared<Node<S>>();
  out->shape = x->shape;
  out->value.resize(x->size());
  for (size_t i = 0; i < x->size(); ++i) out->value[i] = x->value[i] * k;
  out->inputs = {x};
  out->requires_grad = x->requires_grad;
  if (out->requires_grad) {
    out->backward_fn = [k](Node<S>& node) {
      Var<S> in = node.inputs[0];
      if (!in->requires_grad) return;
      for (size_t i = 0; i < node.grad.size(); ++i) in->grad[i] += k * node.grad[i];
    };
  }
  return out;
}

template <typename S>
Var<S> reduce_weighted(const Var<S>& x, std::span<const S> weights) {
  if (weights.size() != x->size()) throw ShapeError("reduce_weighted weight count mismatch");
  auto out = std::make_shared<Node<S>>();
  out->shape = {1};
  S acc = S(0);
  for (size_t i = 0; i < x->size(); ++i) acc += x->value[i] * weights[i];
  out->value = {acc};
  out->inputs = {x};
  out->requires_grad = x->requires_grad;
  if (out->requires_grad) {
    std::vector<S> ws(weights.begin(), weights.end());
    out->backward_fn = [ws = std::move(ws)](Node<S>& node) {
      Var<S> in = node.inputs[0];
      if (!in->requires_grad) return;
      const S g = node.grad[0];
      for (size_t i = 0; i < ws.size(); ++i) in->grad[i] += ws[i] * g;
    };
  }
  return out;
}

template <typename S>
Var<S> normalize_channels(const Var<S>& x, S eps) {
  check_rank4(x->shape, "normalize input");
  const int n = x->shape[0], c = x->shape[1], h = x->shape[2], w = x->shape[3];
  const size_t plane = static_cast<size_t>(h) * w;

  auto out = std::make_shared<Node<S>>();
  out->shape = x->shape;
  out->value.resize(x->size());
  out->inputs = {x};
  out->requires_grad = x->requires_grad;

  for (int i = 0; i < n; ++i) {
    const S* src = x->value.data() + static_cast<size_t>(i) * c * plane;
    S* dst = out->value.data() + static_cast<size_t>(i) * c * plane;
    for (size_t p = 0; p < plane; ++p) {
      S norm2 = S(0);
      for (int ch = 0; ch < c; ++ch) {
        S v = src[ch * plane + p];
        norm2 += v * v;
      }
      S norm = std::sqrt(norm2);
      if (norm < eps) {
        for (int ch = 0; ch < c; ++ch) dst[ch * plane + p] = src[ch * plane + p];
      } else {
        S inv = S(1) / norm;
        for (int ch = 0; ch < c; ++ch) dst[ch * plane + p] = src[ch * plane + p] * inv;
      }
    }
  }

  if (out->requires_grad) {
    out->backward_fn = [n, c, plane, eps](Node<S>& node) {
      Var<S> in = node.inputs[0];
      if (!in->requires_grad) return;
      for (int i = 0; i < n; ++i) {
        const S* src = in->value.data() + static_cast<size_t>(i) * c * plane;
        const S* nv = node.value.data() + static_cast<size_t>(i) * c * plane;
        const S* g = node.grad.data() + static_cast<size_t>(i) * c * plane;
        S* dg = in->grad.data() + static_cast<size_t>(i) * c * plane;
        for (size_t p = 0; p < plane; ++p) {
          S norm2 = S(0);
          for (int ch = 0; ch < c; ++ch) {
            S v = src[ch * plane + p];
            norm2 += v * v;
          }
          S norm = std::sqrt(norm2);
          if (norm < eps) {
            for (int ch = 0; ch < c; ++ch) dg[ch * plane + p] += g[ch * plane + p];
          } else {
            S dot = S(0);
            for (int ch = 0; ch < c; ++ch) dot += nv[ch * plane + p] * g[ch * plane + p];
            S inv = S(1) / norm;
            for (int ch = 0; ch < c; ++ch)
              dg[ch * plane + p] += (g[ch * plane + p] - nv[ch * plane + p] * dot) * inv;
          }
        }
      }
    };
  }
  return out;
}

#define MODREF_INSTANTIATE_OPS(S)                                                          \
  template Var<S> conv2d(const Var<S>&, const Var<S>&, const Var<S>&, int, int);           \
  template Var<S> relu(const Var<S>&);                                                     \
  template Var<S> concat_channels(std::span<const Var<S>>);                                \
  template Var<S> upsample_bilinear(const Var<S>&, int);                                   \
  template Var<S> downsample_avg(const Var<S>&, int);                                      \
  template Var<S> add(const Var<S>&, const Var<S>&);                                       \
  template Var<S> scale(const Var<S>&, S);                                                 \
  template Var<S> reduce_weighted(const Var<S>&, std::span<const S>);                      \
  template Var<S> normalize_channels(const Var<S>&, S);

MODREF_INSTANTIATE_OPS(float)
MODREF_INSTANTIATE_OPS(double)

#undef MODREF_INSTANTIATE_OPS

}  // namespace modref::nn
