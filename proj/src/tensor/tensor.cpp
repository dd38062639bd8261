#include "ppocr/tensor/tensor.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

namespace ppocr {

namespace {

thread_local bool t_grad_mode = true;
std::atomic<std::uint64_t> g_sequence{0};

#ifdef NDEBUG
std::atomic<bool> g_debug_checks{false};
#else
std::atomic<bool> g_debug_checks{true};
#endif

template <typename T>
void check_no_nan(std::string_view op, std::span<const T> values, const char* what) {
  for (T v : values) {
    if (std::isnan(v)) {
      throw NonFiniteError(std::string(what) + " of '" + std::string(op) +
                           "' contains a not-a-number value");
    }
  }
}

}  // namespace

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace detail {
std::uint64_t next_sequence_number() { return ++g_sequence; }
}  // namespace detail

NoGradGuard::NoGradGuard() : previous_(t_grad_mode) { t_grad_mode = false; }
NoGradGuard::~NoGradGuard() { t_grad_mode = previous_; }

bool grad_mode_enabled() { return t_grad_mode; }

void set_debug_checks(bool enabled) { g_debug_checks = enabled; }
bool debug_checks_enabled() { return g_debug_checks; }

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill) : node_(std::make_shared<detail::Node<T>>()) {
  node_->data.assign(ppocr::numel(shape), fill);
  node_->shape = std::move(shape);
  node_->seq = detail::next_sequence_number();
  node_->op = "leaf";
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values)
    : node_(std::make_shared<detail::Node<T>>()) {
  if (ppocr::numel(shape) != values.size()) {
    throw ShapeError("tensor of shape " + to_string(shape) + " cannot hold " +
                     std::to_string(values.size()) + " values");
  }
  node_->data = std::move(values);
  node_->shape = std::move(shape);
  node_->seq = detail::next_sequence_number();
  node_->op = "leaf";
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value) {
  return Tensor(Shape{}, std::vector<T>{value});
}

template <typename T>
const Shape& Tensor<T>::shape() const {
  static const Shape empty;
  return node_ ? node_->shape : empty;
}

template <typename T>
std::size_t Tensor<T>::dim(std::size_t axis) const {
  if (axis >= ndim()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " +
                     to_string(shape()));
  }
  return shape()[axis];
}

template <typename T>
std::size_t Tensor<T>::numel() const {
  return node_ ? node_->data.size() : 0;
}

template <typename T>
std::span<T> Tensor<T>::data() {
  if (!node_) return {};
  return node_->data;
}

template <typename T>
std::span<const T> Tensor<T>::data() const {
  if (!node_) return {};
  return node_->data;
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1) {
    throw ShapeError("item() needs a single-element tensor, got " + to_string(shape()));
  }
  return node_->data[0];
}

template <typename T>
bool Tensor<T>::requires_grad() const {
  return node_ && node_->requires_grad;
}

template <typename T>
Tensor<T>& Tensor<T>::set_requires_grad(bool flag) {
  node_->requires_grad = flag;
  return *this;
}

template <typename T>
bool Tensor<T>::has_grad() const {
  return node_ && !node_->grad.empty();
}

template <typename T>
std::span<const T> Tensor<T>::grad() const {
  if (!node_) return {};
  return node_->grad;
}

template <typename T>
std::span<T> Tensor<T>::grad_buffer() const {
  if (node_->grad.empty()) node_->grad.assign(node_->data.size(), T{0});
  return node_->grad;
}

template <typename T>
void Tensor<T>::zero_grad() {
  if (node_) std::fill(node_->grad.begin(), node_->grad.end(), T{0});
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return Tensor(shape(), std::vector<T>(data().begin(), data().end()));
}

template <typename T>
Tensor<T> record_op(std::string_view op, Shape shape, std::vector<T> values,
                    std::vector<Tensor<T>> inputs,
                    std::function<void(std::span<const T>)> backward) {
  Tensor<T> out(std::move(shape), std::move(values));
  auto& node = *out.node();
  node.op = std::string(op);
  if (debug_checks_enabled()) check_no_nan<T>(op, node.data, "output");

  bool needs_grad = false;
  if (grad_mode_enabled()) {
    for (const auto& in : inputs) needs_grad = needs_grad || in.requires_grad();
  }
  if (needs_grad) {
    node.requires_grad = true;
    node.inputs.reserve(inputs.size());
    for (const auto& in : inputs) node.inputs.push_back(in.node());
    if (debug_checks_enabled()) {
      node.backward = [op = node.op, fn = std::move(backward),
                       ins = std::move(inputs)](std::span<const T> g) mutable {
        fn(g);
        for (const auto& in : ins) {
          if (in.has_grad()) check_no_nan<T>(op, in.grad(), "input gradient");
        }
      };
    } else {
      node.backward = std::move(backward);
    }
  }
  return out;
}

template class Tensor<float>;
template class Tensor<double>;

template Tensor<float> record_op(std::string_view, Shape, std::vector<float>,
                                 std::vector<Tensor<float>>,
                                 std::function<void(std::span<const float>)>);
template Tensor<double> record_op(std::string_view, Shape, std::vector<double>,
                                  std::vector<Tensor<double>>,
                                  std::function<void(std::span<const double>)>);

}  // namespace ppocr
