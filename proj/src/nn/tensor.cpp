#include "modref/nn/tensor.hpp"

#include <unordered_set>

namespace modref::nn {

template <typename S>
std::vector<Node<S>*> topo_order(const Var<S>& root) {
  std::vector<Node<S>*> order;
  std::unordered_set<const Node<S>*> visited;
  // iterative post-order DFS, children in input order
  struct Frame {
    Node<S>* node;
    size_t next_input;
  };
  std::vector<Frame> stack;
  if (!visited.insert(root.get()).second) return order;
  stack.push_back({root.get(), 0});
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next_input < f.node->inputs.size()) {
      Node<S>* child = f.node->inputs[f.next_input++].get();
      if (visited.insert(child).second) stack.push_back({child, 0});
    } else {
      order.push_back(f.node);
      stack.pop_back();
    }
  }
  return order;
}

template <typename S>
void backward(const Var<S>& loss) {
  if (!loss) throw ShapeError("backward on null node");
  if (loss->size() != 1) throw ShapeError("backward requires a scalar loss");

  std::vector<Node<S>*> order = topo_order(loss);
  for (Node<S>* node : order)
    if (node->requires_grad) node->ensure_grad();

  loss->ensure_grad();
  loss->grad[0] = S(1);

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<S>* node = *it;
    if (node->backward_fn && node->requires_grad) node->backward_fn(*node);
  }
}

template std::vector<Node<float>*> topo_order(const Var<float>&);
template std::vector<Node<double>*> topo_order(const Var<double>&);
template void backward(const Var<float>&);
template void backward(const Var<double>&);

}  // namespace modref::nn
