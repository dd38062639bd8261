#ifndef PPOCR_TENSOR_TENSOR_HPP_
#define PPOCR_TENSOR_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ppocr {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

// Raised for any operand whose shape does not fit the operator contract.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a not-a-number shows up while debug checks are enabled.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until something accumulates into it
  bool requires_grad = false;
  std::uint64_t seq = 0;
  std::string op;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(std::span<const T>)> backward;
};

std::uint64_t next_sequence_number();

}  // namespace detail

// Dense row-major array with an optional gradient slot.
//
// A Tensor is a handle: copies alias the same storage and graph node, the
// same way a parameter is shared between a network and its optimizer.
// Use clone() or detach() for an independent buffer.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{0});
  Tensor(Shape shape, std::vector<T> values);

  static Tensor scalar(T value);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t ndim() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<T> data();
  std::span<const T> data() const;
  T item() const;

  bool requires_grad() const;
  Tensor& set_requires_grad(bool flag);

  bool has_grad() const;
  // Zero-length span when nothing has been accumulated yet.
  std::span<const T> grad() const;
  // Allocates a zeroed gradient buffer on first use.
  std::span<T> grad_buffer() const;
  void zero_grad();

  // Independent copy of the values, detached from any graph.
  Tensor detach() const;
  Tensor clone() const { return detach(); }

  template <typename U>
  Tensor<U> cast() const;

  // Same node, for identity comparisons (parameter sharing checks).
  bool same_storage(const Tensor& other) const { return node_ == other.node_; }

  const std::shared_ptr<detail::Node<T>>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node<T>> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node<T>> node_;
};

// Records the result of an operator. When gradient recording is active and
// any input requires a gradient, `backward` is kept and later called with
// the gradient of the result; it must accumulate into the inputs' grad
// buffers (only for inputs with requires_grad()).
template <typename T>
Tensor<T> record_op(std::string_view op, Shape shape, std::vector<T> values,
                    std::vector<Tensor<T>> inputs,
                    std::function<void(std::span<const T>)> backward);

// Scoped switch that disables graph recording on the current thread.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_mode_enabled();

// Not-a-number checks after every forward and backward step. On by default
// in builds without NDEBUG.
void set_debug_checks(bool enabled);
bool debug_checks_enabled();

template <typename T>
template <typename U>
Tensor<U> Tensor<T>::cast() const {
  std::vector<U> out(numel());
  auto src = data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<U>(src[i]);
  Tensor<U> result(shape(), std::move(out));
  result.set_requires_grad(requires_grad());
  return result;
}

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace ppocr

#endif  // PPOCR_TENSOR_TENSOR_HPP_
