#ifndef PPOCR_TENSOR_AUTOGRAD_HPP_
#define PPOCR_TENSOR_AUTOGRAD_HPP_

#include <vector>

#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

// The recorded operations reachable from a loss, in recording order.
// Every operation appears after all of its inputs.
template <typename T>
class Graph {
 public:
  static Graph trace(const Tensor<T>& loss);

  const std::vector<detail::Node<T>*>& operations() const { return ops_; }

  // Seeds d(loss)/d(loss) = 1 and runs each backward rule exactly once in
  // reverse recording order. Gradients accumulate into existing buffers.
  void backward(Tensor<T> loss) const;

 private:
  std::vector<detail::Node<T>*> ops_;
};

// Graph::trace(loss).backward(loss). Rejects non-scalar losses.
template <typename T>
void backward(const Tensor<T>& loss);

extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace ppocr

#endif  // PPOCR_TENSOR_AUTOGRAD_HPP_
