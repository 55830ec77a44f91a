#include "modref/nn/adam.hpp"

#include <cmath>

namespace modref::nn {

template <typename S>
void Adam<S>::step(std::span<const Parameter<S>> params) {
  ++t_;
  const S bc1 = S(1) - static_cast<S>(std::pow(static_cast<double>(beta1_), t_));
  const S bc2 = S(1) - static_cast<S>(std::pow(static_cast<double>(beta2_), t_));
  for (const Parameter<S>& p : params) {
    if (!p.trainable) continue;
    Node<S>& node = *p.var;
    node.ensure_grad();
    Moments& mom = state_[p.var.get()];
    if (mom.m.size() != node.value.size()) {
      mom.m.assign(node.value.size(), S(0));
      mom.v.assign(node.value.size(), S(0));
    }
    for (size_t i = 0; i < node.value.size(); ++i) {
      const S g = node.grad[i];
      if (!std::isfinite(static_cast<double>(g)))
        throw TrainingError("non-finite gradient in parameter '" + node.name + "'");
      mom.m[i] = beta1_ * mom.m[i] + (S(1) - beta1_) * g;
      mom.v[i] = beta2_ * mom.v[i] + (S(1) - beta2_) * g * g;
      const S mhat = mom.m[i] / bc1;
      const S vhat = mom.v[i] / bc2;
      node.value[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

template <typename S>
void zero_gradients(std::span<const Parameter<S>> params) {
  for (const Parameter<S>& p : params) p.var->zero_grad();
}

template class Adam<float>;
template class Adam<double>;
template void zero_gradients(std::span<const Parameter<float>>);
template void zero_gradients(std::span<const Parameter<double>>);

}  // namespace modref::nn
