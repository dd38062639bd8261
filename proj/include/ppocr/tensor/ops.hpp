#ifndef PPOCR_TENSOR_OPS_HPP_
#define PPOCR_TENSOR_OPS_HPP_

#include <array>
#include <string_view>
#include <vector>

#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

enum class Activation { identity, relu, relu6, sigmoid, hswish, hsigmoid };

// Parses "relu", "relu6", "sigmoid", "hswish", "hsigmoid" or "identity";
// throws std::invalid_argument otherwise.
Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation kind);

// Scalar forms, shared by the tensor op and by tests.
double activate(Activation kind, double x);
// Derivative with 0 at the relu6 kinks (x + 3 in {0, 6}).
double activate_derivative(Activation kind, double x);

struct IntPair {
  int h = 1;
  int w = 1;
  IntPair() = default;
  IntPair(int both) : h(both), w(both) {}  // NOLINT: implicit by intent
  IntPair(int h_, int w_) : h(h_), w(w_) {}
};

// Elementwise, identical shapes.
template <typename T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);
template <typename T> Tensor<T> scale(const Tensor<T>& a, T factor);
template <typename T> Tensor<T> add_scalar(const Tensor<T>& a, T value);

template <typename T> Tensor<T> sum(const Tensor<T>& a);
template <typename T> Tensor<T> mean(const Tensor<T>& a);
// Mean over one axis; that axis is removed from the shape.
template <typename T> Tensor<T> mean_axis(const Tensor<T>& a, std::size_t axis);

template <typename T> Tensor<T> reshape(const Tensor<T>& a, Shape shape);
template <typename T> Tensor<T> permute(const Tensor<T>& a, const std::vector<std::size_t>& order);
template <typename T>
Tensor<T> narrow(const Tensor<T>& a, std::size_t axis, std::size_t start, std::size_t length);

// [M,K] x [K,N] -> [M,N]
template <typename T> Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);
// x [M,K], weight [N,K], bias [N] (bias may be undefined) -> [M,N]
template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

// input NCHW, kernel OIHW with I = C / groups.
template <typename T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernel, IntPair stride,
                 IntPair padding, int groups = 1);
// x NCHW + bias C
template <typename T> Tensor<T> add_channel_bias(const Tensor<T>& x, const Tensor<T>& bias);
// x NCHW scaled by s NC11 per (n, c).
template <typename T> Tensor<T> mul_channels(const Tensor<T>& x, const Tensor<T>& s);

template <typename T> Tensor<T> activation(const Tensor<T>& x, Activation kind);

template <typename T> Tensor<T> softmax(const Tensor<T>& logits, std::size_t axis);
template <typename T> Tensor<T> log_softmax(const Tensor<T>& logits, std::size_t axis);

// NCHW -> NC11
template <typename T> Tensor<T> global_avg_pool(const Tensor<T>& x);
// NCHW -> N C (H*f) (W*f), nearest neighbour.
template <typename T> Tensor<T> upsample_nearest(const Tensor<T>& x, int factor);

}  // namespace ppocr

#endif  // PPOCR_TENSOR_OPS_HPP_
