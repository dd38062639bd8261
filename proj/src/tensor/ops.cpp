#include "ppocr/tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Core>

namespace ppocr {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

template <typename T>
void require_same_shape(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                     to_string(b.shape()));
  }
}

void require_axis(const char* op, const Shape& shape, std::size_t axis) {
  if (axis >= shape.size()) {
    throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) +
                     " out of range for shape " + to_string(shape));
  }
}

// outer = product of extents before axis, inner = product after it.
struct AxisSplit {
  std::size_t outer = 1, extent = 1, inner = 1;
};

AxisSplit split_at(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

double relu6(double x) { return std::min(std::max(x, 0.0), 6.0); }
double relu6_slope(double x) { return (x > 0.0 && x < 6.0) ? 1.0 : 0.0; }

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "relu6") return Activation::relu6;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "hswish") return Activation::hswish;
  if (name == "hsigmoid") return Activation::hsigmoid;
  throw std::invalid_argument("unknown activation kind '" + std::string(name) + "'");
}

std::string_view activation_name(Activation kind) {
  switch (kind) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::relu6: return "relu6";
    case Activation::sigmoid: return "sigmoid";
    case Activation::hswish: return "hswish";
    case Activation::hsigmoid: return "hsigmoid";
  }
  throw std::invalid_argument("unknown activation kind");
}

double activate(Activation kind, double x) {
  switch (kind) {
    case Activation::identity: return x;
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::relu6: return relu6(x);
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::hswish: return x * relu6(x + 3.0) / 6.0;
    case Activation::hsigmoid: return relu6(x + 3.0) / 6.0;
  }
  throw std::invalid_argument("unknown activation kind");
}

double activate_derivative(Activation kind, double x) {
  switch (kind) {
    case Activation::identity: return 1.0;
    case Activation::relu: return x > 0.0 ? 1.0 : 0.0;
    case Activation::relu6: return relu6_slope(x);
    case Activation::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return s * (1.0 - s);
    }
    case Activation::hswish: return relu6(x + 3.0) / 6.0 + x * relu6_slope(x + 3.0) / 6.0;
    case Activation::hsigmoid: return relu6_slope(x + 3.0) / 6.0;
  }
  throw std::invalid_argument("unknown activation kind");
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("add", a, b);
  std::vector<T> out(a.numel());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
  return record_op<T>("add", a.shape(), std::move(out), {a, b},
                      [a, b](std::span<const T> g) mutable {
                        for (auto* t : {&a, &b}) {
                          if (!t->requires_grad()) continue;
                          auto d = t->grad_buffer();
                          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                        }
                      });
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("sub", a, b);
  std::vector<T> out(a.numel());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  return record_op<T>("sub", a.shape(), std::move(out), {a, b},
                      [a, b](std::span<const T> g) mutable {
                        if (a.requires_grad()) {
                          auto d = a.grad_buffer();
                          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                        }
                        if (b.requires_grad()) {
                          auto d = b.grad_buffer();
                          for (std::size_t i = 0; i < g.size(); ++i) d[i] -= g[i];
                        }
                      });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require_same_shape("mul", a, b);
  std::vector<T> out(a.numel());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return record_op<T>("mul", a.shape(), std::move(out), {a, b},
                      [a, b](std::span<const T> g) mutable {
                        if (a.requires_grad()) {
                          auto d = a.grad_buffer();
                          auto y = b.data();
                          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * y[i];
                        }
                        if (b.requires_grad()) {
                          auto d = b.grad_buffer();
                          auto x = a.data();
                          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * x[i];
                        }
                      });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& v : out) v *= factor;
  return record_op<T>("scale", a.shape(), std::move(out), {a},
                      [a, factor](std::span<const T> g) mutable {
                        auto d = a.grad_buffer();
                        for (std::size_t i = 0; i < g.size(); ++i) d[i] += factor * g[i];
                      });
}

template <typename T>
Tensor<T> add_scalar(const Tensor<T>& a, T value) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& v : out) v += value;
  return record_op<T>("add_scalar", a.shape(), std::move(out), {a},
                      [a](std::span<const T> g) mutable {
                        auto d = a.grad_buffer();
                        for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                      });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  T total = std::accumulate(a.data().begin(), a.data().end(), T{0});
  return record_op<T>("sum", Shape{}, {total}, {a}, [a](std::span<const T> g) mutable {
    for (auto& d : a.grad_buffer()) d += g[0];
  });
}

template <typename T>
Tensor<T> mean(const Tensor<T>& a) {
  const auto n = a.numel();
  if (n == 0) throw ShapeError("mean of an empty tensor");
  T total = std::accumulate(a.data().begin(), a.data().end(), T{0});
  return record_op<T>("mean", Shape{}, {total / static_cast<T>(n)}, {a},
                      [a, n](std::span<const T> g) mutable {
                        const T share = g[0] / static_cast<T>(n);
                        for (auto& d : a.grad_buffer()) d += share;
                      });
}

template <typename T>
Tensor<T> mean_axis(const Tensor<T>& a, std::size_t axis) {
  require_axis("mean_axis", a.shape(), axis);
  const auto s = split_at(a.shape(), axis);
  if (s.extent == 0) throw ShapeError("mean_axis over an empty axis");
  Shape out_shape = a.shape();
  out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
  std::vector<T> out(s.outer * s.inner, T{0});
  auto x = a.data();
  const T inv = T{1} / static_cast<T>(s.extent);
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t e = 0; e < s.extent; ++e) {
      const T* src = &x[(o * s.extent + e) * s.inner];
      T* dst = &out[o * s.inner];
      for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i];
    }
  }
  for (auto& v : out) v *= inv;
  return record_op<T>("mean_axis", std::move(out_shape), std::move(out), {a},
                      [a, s, inv](std::span<const T> g) mutable {
                        auto d = a.grad_buffer();
                        for (std::size_t o = 0; o < s.outer; ++o) {
                          for (std::size_t e = 0; e < s.extent; ++e) {
                            T* dst = &d[(o * s.extent + e) * s.inner];
                            const T* src = &g[o * s.inner];
                            for (std::size_t i = 0; i < s.inner; ++i) dst[i] += src[i] * inv;
                          }
                        }
                      });
}

template <typename T>
Tensor<T> reshape(const Tensor<T>& a, Shape shape) {
  if (numel(shape) != a.numel()) {
    throw ShapeError("reshape: cannot view " + to_string(a.shape()) + " as " + to_string(shape));
  }
  std::vector<T> out(a.data().begin(), a.data().end());
  return record_op<T>("reshape", std::move(shape), std::move(out), {a},
                      [a](std::span<const T> g) mutable {
                        auto d = a.grad_buffer();
                        for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                      });
}

template <typename T>
Tensor<T> permute(const Tensor<T>& a, const std::vector<std::size_t>& order) {
  const auto& in_shape = a.shape();
  const std::size_t nd = in_shape.size();
  if (order.size() != nd) throw ShapeError("permute: order rank differs from tensor rank");
  std::vector<bool> used(nd, false);
  for (auto o : order) {
    if (o >= nd || used[o]) throw ShapeError("permute: order is not a permutation");
    used[o] = true;
  }
  Shape out_shape(nd);
  for (std::size_t i = 0; i < nd; ++i) out_shape[i] = in_shape[order[i]];

  std::vector<std::size_t> in_strides(nd, 1);
  for (std::size_t i = nd; i-- > 1;) in_strides[i - 1] = in_strides[i] * in_shape[i];
  // Source offset for every destination element, in destination order.
  std::vector<std::size_t> gather(a.numel());
  std::vector<std::size_t> idx(nd, 0);
  for (std::size_t flat = 0; flat < gather.size(); ++flat) {
    std::size_t off = 0;
    for (std::size_t i = 0; i < nd; ++i) off += idx[i] * in_strides[order[i]];
    gather[flat] = off;
    for (std::size_t i = nd; i-- > 0;) {
      if (++idx[i] < out_shape[i]) break;
      idx[i] = 0;
    }
  }
  std::vector<T> out(gather.size());
  auto x = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[gather[i]];
  return record_op<T>("permute", std::move(out_shape), std::move(out), {a},
                      [a, gather = std::move(gather)](std::span<const T> g) mutable {
                        auto d = a.grad_buffer();
                        for (std::size_t i = 0; i < g.size(); ++i) d[gather[i]] += g[i];
                      });
}

template <typename T>
Tensor<T> narrow(const Tensor<T>& a, std::size_t axis, std::size_t start, std::size_t length) {
  require_axis("narrow", a.shape(), axis);
  const auto s = split_at(a.shape(), axis);
  if (start + length > s.extent) {
    throw ShapeError("narrow: range [" + std::to_string(start) + ", " +
                     std::to_string(start + length) + ") exceeds axis of " + to_string(a.shape()));
  }
  Shape out_shape = a.shape();
  out_shape[axis] = length;
  std::vector<T> out(s.outer * length * s.inner);
  auto x = a.data();
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(&x[(o * s.extent + start) * s.inner], length * s.inner,
                &out[o * length * s.inner]);
  }
  return record_op<T>("narrow", std::move(out_shape), std::move(out), {a},
                      [a, s, start, length](std::span<const T> g) mutable {
                        auto d = a.grad_buffer();
                        for (std::size_t o = 0; o < s.outer; ++o) {
                          T* dst = &d[(o * s.extent + start) * s.inner];
                          const T* src = &g[o * length * s.inner];
                          for (std::size_t i = 0; i < length * s.inner; ++i) dst[i] += src[i];
                        }
                      });
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: incompatible shapes " + to_string(a.shape()) + " and " +
                     to_string(b.shape()));
  }
  const auto m = static_cast<Eigen::Index>(a.dim(0));
  const auto k = static_cast<Eigen::Index>(a.dim(1));
  const auto n = static_cast<Eigen::Index>(b.dim(1));
  std::vector<T> out(static_cast<std::size_t>(m * n));
  MapMat<T>(out.data(), m, n).noalias() =
      ConstMapMat<T>(a.data().data(), m, k) * ConstMapMat<T>(b.data().data(), k, n);
  return record_op<T>("matmul", Shape{a.dim(0), b.dim(1)}, std::move(out), {a, b},
                      [a, b, m, k, n](std::span<const T> g) mutable {
                        ConstMapMat<T> gm(g.data(), m, n);
                        if (a.requires_grad()) {
                          MapMat<T>(a.grad_buffer().data(), m, k).noalias() +=
                              gm * ConstMapMat<T>(b.data().data(), k, n).transpose();
                        }
                        if (b.requires_grad()) {
                          MapMat<T>(b.grad_buffer().data(), k, n).noalias() +=
                              ConstMapMat<T>(a.data().data(), m, k).transpose() * gm;
                        }
                      });
}

template <typename T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  if (x.ndim() != 2 || weight.ndim() != 2 || x.dim(1) != weight.dim(1)) {
    throw ShapeError("linear: input " + to_string(x.shape()) + " does not fit weight " +
                     to_string(weight.shape()));
  }
  const bool has_bias = bias.defined();
  if (has_bias && (bias.ndim() != 1 || bias.dim(0) != weight.dim(0))) {
    throw ShapeError("linear: bias " + to_string(bias.shape()) + " does not fit weight " +
                     to_string(weight.shape()));
  }
  const auto m = static_cast<Eigen::Index>(x.dim(0));
  const auto k = static_cast<Eigen::Index>(x.dim(1));
  const auto n = static_cast<Eigen::Index>(weight.dim(0));
  std::vector<T> out(static_cast<std::size_t>(m * n));
  MapMat<T> om(out.data(), m, n);
  om.noalias() = ConstMapMat<T>(x.data().data(), m, k) *
                 ConstMapMat<T>(weight.data().data(), n, k).transpose();
  if (has_bias) {
    auto bv = bias.data();
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) om(i, j) += bv[static_cast<std::size_t>(j)];
  }
  std::vector<Tensor<T>> inputs{x, weight};
  if (has_bias) inputs.push_back(bias);
  return record_op<T>(
      "linear", Shape{x.dim(0), weight.dim(0)}, std::move(out), std::move(inputs),
      [x, weight, bias, m, k, n](std::span<const T> g) mutable {
        ConstMapMat<T> gm(g.data(), m, n);
        if (x.requires_grad()) {
          MapMat<T>(x.grad_buffer().data(), m, k).noalias() +=
              gm * ConstMapMat<T>(weight.data().data(), n, k);
        }
        if (weight.requires_grad()) {
          MapMat<T>(weight.grad_buffer().data(), n, k).noalias() +=
              gm.transpose() * ConstMapMat<T>(x.data().data(), m, k);
        }
        if (bias.defined() && bias.requires_grad()) {
          auto d = bias.grad_buffer();
          for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j) d[static_cast<std::size_t>(j)] += gm(i, j);
        }
      });
}

template <typename T>
Tensor<T> add_channel_bias(const Tensor<T>& x, const Tensor<T>& bias) {
  if (x.ndim() != 4 || bias.ndim() != 1 || bias.dim(0) != x.dim(1)) {
    throw ShapeError("add_channel_bias: bias " + to_string(bias.shape()) + " does not fit " +
                     to_string(x.shape()));
  }
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  std::vector<T> out(x.data().begin(), x.data().end());
  auto bv = bias.data();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      T* p = &out[(i * c + j) * hw];
      for (std::size_t q = 0; q < hw; ++q) p[q] += bv[j];
    }
  return record_op<T>("add_channel_bias", x.shape(), std::move(out), {x, bias},
                      [x, bias, n, c, hw](std::span<const T> g) mutable {
                        if (x.requires_grad()) {
                          auto d = x.grad_buffer();
                          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                        }
                        if (bias.requires_grad()) {
                          auto d = bias.grad_buffer();
                          for (std::size_t i = 0; i < n; ++i)
                            for (std::size_t j = 0; j < c; ++j) {
                              const T* p = &g[(i * c + j) * hw];
                              T acc{0};
                              for (std::size_t q = 0; q < hw; ++q) acc += p[q];
                              d[j] += acc;
                            }
                        }
                      });
}

template <typename T>
Tensor<T> mul_channels(const Tensor<T>& x, const Tensor<T>& s) {
  if (x.ndim() != 4 || s.ndim() != 4 || s.dim(0) != x.dim(0) || s.dim(1) != x.dim(1) ||
      s.dim(2) != 1 || s.dim(3) != 1) {
    throw ShapeError("mul_channels: scale " + to_string(s.shape()) + " does not fit " +
                     to_string(x.shape()));
  }
  const std::size_t nc = x.dim(0) * x.dim(1), hw = x.dim(2) * x.dim(3);
  std::vector<T> out(x.numel());
  auto xv = x.data(), sv = s.data();
  for (std::size_t i = 0; i < nc; ++i)
    for (std::size_t q = 0; q < hw; ++q) out[i * hw + q] = xv[i * hw + q] * sv[i];
  return record_op<T>("mul_channels", x.shape(), std::move(out), {x, s},
                      [x, s, nc, hw](std::span<const T> g) mutable {
                        if (x.requires_grad()) {
                          auto d = x.grad_buffer();
                          auto sv = s.data();
                          for (std::size_t i = 0; i < nc; ++i)
                            for (std::size_t q = 0; q < hw; ++q)
                              d[i * hw + q] += g[i * hw + q] * sv[i];
                        }
                        if (s.requires_grad()) {
                          auto d = s.grad_buffer();
                          auto xv = x.data();
                          for (std::size_t i = 0; i < nc; ++i) {
                            T acc{0};
                            for (std::size_t q = 0; q < hw; ++q) acc += g[i * hw + q] * xv[i * hw + q];
                            d[i] += acc;
                          }
                        }
                      });
}

template <typename T>
Tensor<T> activation(const Tensor<T>& x, Activation kind) {
  std::vector<T> out(x.numel());
  auto xv = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<T>(activate(kind, static_cast<double>(xv[i])));
  }
  return record_op<T>(std::string(activation_name(kind)), x.shape(), std::move(out), {x},
                      [x, kind](std::span<const T> g) mutable {
                        auto d = x.grad_buffer();
                        auto xv = x.data();
                        for (std::size_t i = 0; i < g.size(); ++i) {
                          d[i] += g[i] * static_cast<T>(activate_derivative(
                                             kind, static_cast<double>(xv[i])));
                        }
                      });
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits, std::size_t axis) {
  require_axis("softmax", logits.shape(), axis);
  const auto s = split_at(logits.shape(), axis);
  std::vector<T> out(logits.numel());
  auto x = logits.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) {
      const std::size_t base = o * s.extent * s.inner + i;
      T mx = x[base];
      for (std::size_t e = 1; e < s.extent; ++e) mx = std::max(mx, x[base + e * s.inner]);
      T z{0};
      for (std::size_t e = 0; e < s.extent; ++e) {
        const T v = std::exp(x[base + e * s.inner] - mx);
        out[base + e * s.inner] = v;
        z += v;
      }
      for (std::size_t e = 0; e < s.extent; ++e) out[base + e * s.inner] /= z;
    }
  auto probs = out;
  return record_op<T>("softmax", logits.shape(), std::move(out), {logits},
                      [logits, s, probs = std::move(probs)](std::span<const T> g) mutable {
                        auto d = logits.grad_buffer();
                        for (std::size_t o = 0; o < s.outer; ++o)
                          for (std::size_t i = 0; i < s.inner; ++i) {
                            const std::size_t base = o * s.extent * s.inner + i;
                            T dot{0};
                            for (std::size_t e = 0; e < s.extent; ++e) {
                              const auto k = base + e * s.inner;
                              dot += g[k] * probs[k];
                            }
                            for (std::size_t e = 0; e < s.extent; ++e) {
                              const auto k = base + e * s.inner;
                              d[k] += probs[k] * (g[k] - dot);
                            }
                          }
                      });
}

template <typename T>
Tensor<T> log_softmax(const Tensor<T>& logits, std::size_t axis) {
  require_axis("log_softmax", logits.shape(), axis);
  const auto s = split_at(logits.shape(), axis);
  std::vector<T> out(logits.numel());
  auto x = logits.data();
  for (std::size_t o = 0; o < s.outer; ++o)
    for (std::size_t i = 0; i < s.inner; ++i) {
      const std::size_t base = o * s.extent * s.inner + i;
      T mx = x[base];
      for (std::size_t e = 1; e < s.extent; ++e) mx = std::max(mx, x[base + e * s.inner]);
      T z{0};
      for (std::size_t e = 0; e < s.extent; ++e) z += std::exp(x[base + e * s.inner] - mx);
      const T lz = mx + std::log(z);
      for (std::size_t e = 0; e < s.extent; ++e)
        out[base + e * s.inner] = x[base + e * s.inner] - lz;
    }
  auto logp = out;
  return record_op<T>("log_softmax", logits.shape(), std::move(out), {logits},
                      [logits, s, logp = std::move(logp)](std::span<const T> g) mutable {
                        auto d = logits.grad_buffer();
                        for (std::size_t o = 0; o < s.outer; ++o)
                          for (std::size_t i = 0; i < s.inner; ++i) {
                            const std::size_t base = o * s.extent * s.inner + i;
                            T gsum{0};
                            for (std::size_t e = 0; e < s.extent; ++e) gsum += g[base + e * s.inner];
                            for (std::size_t e = 0; e < s.extent; ++e) {
                              const auto k = base + e * s.inner;
                              d[k] += g[k] - std::exp(logp[k]) * gsum;
                            }
                          }
                      });
}

template <typename T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
  if (x.ndim() != 4 || x.dim(2) == 0 || x.dim(3) == 0) {
    throw ShapeError("global_avg_pool: expected non-empty NCHW input, got " +
                     to_string(x.shape()));
  }
  const std::size_t nc = x.dim(0) * x.dim(1), hw = x.dim(2) * x.dim(3);
  std::vector<T> out(nc);
  auto xv = x.data();
  for (std::size_t i = 0; i < nc; ++i) {
    T acc{0};
    for (std::size_t q = 0; q < hw; ++q) acc += xv[i * hw + q];
    out[i] = acc / static_cast<T>(hw);
  }
  return record_op<T>("global_avg_pool", Shape{x.dim(0), x.dim(1), 1, 1}, std::move(out), {x},
                      [x, nc, hw](std::span<const T> g) mutable {
                        auto d = x.grad_buffer();
                        for (std::size_t i = 0; i < nc; ++i) {
                          const T share = g[i] / static_cast<T>(hw);
                          for (std::size_t q = 0; q < hw; ++q) d[i * hw + q] += share;
                        }
                      });
}

template <typename T>
Tensor<T> upsample_nearest(const Tensor<T>& x, int factor) {
  if (x.ndim() != 4 || factor < 1) {
    throw ShapeError("upsample_nearest: expected NCHW input and factor >= 1, got " +
                     to_string(x.shape()));
  }
  const std::size_t f = static_cast<std::size_t>(factor);
  const std::size_t nc = x.dim(0) * x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t oh = h * f, ow = w * f;
  std::vector<T> out(nc * oh * ow);
  auto xv = x.data();
  for (std::size_t i = 0; i < nc; ++i)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t xx = 0; xx < ow; ++xx)
        out[(i * oh + y) * ow + xx] = xv[(i * h + y / f) * w + xx / f];
  return record_op<T>("upsample_nearest", Shape{x.dim(0), x.dim(1), oh, ow}, std::move(out), {x},
                      [x, nc, h, w, f, oh, ow](std::span<const T> g) mutable {
                        auto d = x.grad_buffer();
                        for (std::size_t i = 0; i < nc; ++i)
                          for (std::size_t y = 0; y < oh; ++y)
                            for (std::size_t xx = 0; xx < ow; ++xx)
                              d[(i * h + y / f) * w + xx / f] += g[(i * oh + y) * ow + xx];
                      });
}

#define PPOCR_INSTANTIATE_OPS(T)                                                             \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> sub(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                \
  template Tensor<T> scale(const Tensor<T>&, T);                                             \
  template Tensor<T> add_scalar(const Tensor<T>&, T);                                        \
  template Tensor<T> sum(const Tensor<T>&);                                                  \
  template Tensor<T> mean(const Tensor<T>&);                                                 \
  template Tensor<T> mean_axis(const Tensor<T>&, std::size_t);                               \
  template Tensor<T> reshape(const Tensor<T>&, Shape);                                       \
  template Tensor<T> permute(const Tensor<T>&, const std::vector<std::size_t>&);             \
  template Tensor<T> narrow(const Tensor<T>&, std::size_t, std::size_t, std::size_t);        \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                             \
  template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);           \
  template Tensor<T> add_channel_bias(const Tensor<T>&, const Tensor<T>&);                   \
  template Tensor<T> mul_channels(const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> activation(const Tensor<T>&, Activation);                               \
  template Tensor<T> softmax(const Tensor<T>&, std::size_t);                                 \
  template Tensor<T> log_softmax(const Tensor<T>&, std::size_t);                             \
  template Tensor<T> global_avg_pool(const Tensor<T>&);                                      \
  template Tensor<T> upsample_nearest(const Tensor<T>&, int);

PPOCR_INSTANTIATE_OPS(float)
PPOCR_INSTANTIATE_OPS(double)

}  // namespace ppocr
