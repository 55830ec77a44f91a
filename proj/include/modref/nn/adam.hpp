#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "modref/nn/tensor.hpp"

namespace modref::nn {

/// Bias-corrected adaptive-moment optimizer. Moment buffers are keyed by
/// parameter node; parameters must be passed in a stable order for
/// bit-deterministic trajectories. Non-finite gradients abort with a
/// TrainingError naming the parameter.
template <typename S>
class Adam {
 public:
  explicit Adam(S lr = S(1e-3), S beta1 = S(0.9), S beta2 = S(0.999), S eps = S(1e-8))
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::span<const Parameter<S>> params);

  int64_t steps_taken() const { return t_; }
  S learning_rate() const { return lr_; }
  void set_learning_rate(S lr) { lr_ = lr; }

 private:
  struct Moments {
    std::vector<S> m, v;
  };

  S lr_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::unordered_map<const Node<S>*, Moments> state_;
};

template <typename S>
void zero_gradients(std::span<const Parameter<S>> params);

}  // namespace modref::nn
