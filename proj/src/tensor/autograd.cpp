#include "ppocr/tensor/autograd.hpp"

#include <algorithm>
#include <unordered_set>

namespace ppocr {

template <typename T>
Graph<T> Graph<T>::trace(const Tensor<T>& loss) {
  Graph graph;
  if (!loss.defined()) return graph;
  std::unordered_set<detail::Node<T>*> seen;
  std::vector<detail::Node<T>*> stack{loss.node().get()};
  while (!stack.empty()) {
    auto* node = stack.back();
    stack.pop_back();
    if (!seen.insert(node).second) continue;
    if (node->backward) graph.ops_.push_back(node);
    for (const auto& in : node->inputs) {
      if (in->requires_grad) stack.push_back(in.get());
    }
  }
  // Inputs are always created before the operations consuming them.
  std::sort(graph.ops_.begin(), graph.ops_.end(),
            [](const auto* a, const auto* b) { return a->seq < b->seq; });
  return graph;
}

template <typename T>
void Graph<T>::backward(Tensor<T> loss) const {
  if (loss.numel() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " + to_string(loss.shape()));
  }
  if (!loss.requires_grad()) return;
  // Intermediate results start clean so repeated passes only add to leaves.
  for (auto* node : ops_) node->grad.clear();
  loss.grad_buffer()[0] += T{1};
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) {
    auto* node = *it;
    if (node->grad.empty()) continue;  // nothing flowed into this branch
    node->backward(node->grad);
  }
}

template <typename T>
void backward(const Tensor<T>& loss) {
  if (loss.numel() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " + to_string(loss.shape()));
  }
  Graph<T>::trace(loss).backward(loss);
}

template class Graph<float>;
template class Graph<double>;
template void backward(const Tensor<float>&);
template void backward(const Tensor<double>&);

}  // namespace ppocr
