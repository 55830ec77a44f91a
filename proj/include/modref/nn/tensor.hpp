#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "modref/error.hpp"

namespace modref::nn {

/// One node of the reverse-mode graph: a value buffer, an optional gradient
/// buffer of identical shape, and the backward rule that scatters this
/// node's gradient into its inputs. Interior nodes are rebuilt per forward
/// pass; parameter leaves persist across steps.
template <typename S>
struct Node {
  std::vector<int> shape;
  std::vector<S> value;
  std::vector<S> grad;
  bool requires_grad = false;
  std::string name;

  std::vector<std::shared_ptr<Node<S>>> inputs;
  std::function<void(Node<S>&)> backward_fn;

  size_t size() const { return value.size(); }

  int dim(size_t i) const {
    if (i >= shape.size()) throw ShapeError("tensor rank too small");
    return shape[i];
  }

  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), S(0));
  }

  void zero_grad() { grad.assign(value.size(), S(0)); }
};

template <typename S>
using Var = std::shared_ptr<Node<S>>;

/// Named, trainable leaf.
template <typename S>
struct Parameter {
  Var<S> var;
  bool trainable = true;
};

inline size_t numel(const std::vector<int>& shape) {
  size_t n = 1;
  for (int d : shape) {
    if (d <= 0) throw ShapeError("non-positive dimension");
    n *= static_cast<size_t>(d);
  }
  return n;
}

template <typename S>
Var<S> make_constant(std::vector<int> shape, std::vector<S> value) {
  if (numel(shape) != value.size()) throw ShapeError("value count does not match shape");
  auto node = std::make_shared<Node<S>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  return node;
}

template <typename S>
Var<S> make_zeros(std::vector<int> shape) {
  auto node = std::make_shared<Node<S>>();
  node->value.assign(numel(shape), S(0));
  node->shape = std::move(shape);
  return node;
}

template <typename S>
Var<S> make_parameter(std::vector<int> shape, std::vector<S> value, std::string name) {
  Var<S> node = make_constant<S>(std::move(shape), std::move(value));
  node->requires_grad = true;
  node->name = std::move(name);
  node->ensure_grad();
  return node;
}

/// Reverse topological order over the subgraph reachable from `root`
/// (deterministic: DFS following input order).
template <typename S>
std::vector<Node<S>*> topo_order(const Var<S>& root);

/// Seeds d(loss)/d(loss) = 1 and runs backward rules in exact reverse
/// topological order. `loss` must be scalar.
template <typename S>
void backward(const Var<S>& loss);

}  // namespace modref::nn
