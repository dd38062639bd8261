#include "ppocr/losses/divergence.hpp"

#include <cmath>
#include <stdexcept>

#include "ppocr/tensor/ops.hpp"

namespace ppocr {

namespace {

template <typename T>
void require_distribution(const char* which, const Tensor<T>& x) {
  if (x.ndim() == 0) throw ShapeError(std::string("kl_div: ") + which + " must have an axis");
  const std::size_t classes = x.shape().back();
  const std::size_t rows = x.numel() / classes;
  auto v = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      const double e = v[r * classes + c];
      if (e < 0.0) throw std::invalid_argument(std::string("kl_div: ") + which + " has a negative entry");
      total += e;
    }
    if (std::abs(total - 1.0) > 1e-5) {
      throw std::invalid_argument(std::string("kl_div: ") + which + " row " + std::to_string(r) +
                                  " sums to " + std::to_string(total) + ", not 1");
    }
  }
}

}  // namespace

template <typename T>
Tensor<T> kl_div(const Tensor<T>& p, const Tensor<T>& q) {
  if (p.shape() != q.shape()) {
    throw ShapeError("kl_div: shape mismatch " + to_string(p.shape()) + " vs " +
                     to_string(q.shape()));
  }
  require_distribution("p", p);
  require_distribution("q", q);
  const std::size_t classes = p.shape().back();
  const std::size_t rows = p.numel() / classes;
  const T floor = static_cast<T>(kKlFloor);
  auto pv = p.data(), qv = q.data();
  T total{0};
  for (std::size_t i = 0; i < pv.size(); ++i) {
    if (pv[i] > T{0}) total += pv[i] * std::log(pv[i] / std::max(qv[i], floor));
  }
  const T inv_rows = T{1} / static_cast<T>(rows);
  return record_op<T>(
      "kl_div", Shape{}, {total * inv_rows}, {p, q},
      [p, q, inv_rows, floor](std::span<const T> g) mutable {
        auto pv = p.data(), qv = q.data();
        const T s = g[0] * inv_rows;
        if (p.requires_grad()) {
          auto d = p.grad_buffer();
          for (std::size_t i = 0; i < pv.size(); ++i) {
            if (pv[i] > T{0}) d[i] += s * (std::log(pv[i] / std::max(qv[i], floor)) + T{1});
          }
        }
        if (q.requires_grad()) {
          auto d = q.grad_buffer();
          for (std::size_t i = 0; i < pv.size(); ++i) {
            if (qv[i] >= floor) d[i] -= s * pv[i] / qv[i];
          }
        }
      });
}

template <typename T>
Tensor<T> dml_loss(const Tensor<T>& a_logits, const Tensor<T>& b_logits) {
  if (a_logits.shape() != b_logits.shape() || a_logits.ndim() == 0) {
    throw ShapeError("dml_loss: shape mismatch " + to_string(a_logits.shape()) + " vs " +
                     to_string(b_logits.shape()));
  }
  const std::size_t axis = a_logits.ndim() - 1;
  auto pa = softmax(a_logits, axis);
  auto pb = softmax(b_logits, axis);
  return scale(add(kl_div(pa, pb), kl_div(pb, pa)), T{0.5});
}

template <typename T>
Tensor<T> bernoulli_logits(const Tensor<T>& z) {
  Shape shape = z.shape();
  shape.push_back(2);
  std::vector<T> out(z.numel() * 2, T{0});
  auto zv = z.data();
  for (std::size_t i = 0; i < zv.size(); ++i) out[2 * i] = zv[i];
  return record_op<T>("bernoulli_logits", std::move(shape), std::move(out), {z},
                      [z](std::span<const T> g) mutable {
                        auto d = z.grad_buffer();
                        for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[2 * i];
                      });
}

template <typename T>
Tensor<T> feature_loss(const Tensor<T>& s_feat, const Tensor<T>& t_feat) {
  if (s_feat.shape() != t_feat.shape()) {
    throw ShapeError("feature_loss: shape mismatch " + to_string(s_feat.shape()) + " vs " +
                     to_string(t_feat.shape()));
  }
  auto diff = sub(s_feat, t_feat);
  return mean(mul(diff, diff));
}

template Tensor<float> kl_div(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> kl_div(const Tensor<double>&, const Tensor<double>&);
template Tensor<float> dml_loss(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> dml_loss(const Tensor<double>&, const Tensor<double>&);
template Tensor<float> bernoulli_logits(const Tensor<float>&);
template Tensor<double> bernoulli_logits(const Tensor<double>&);
template Tensor<float> feature_loss(const Tensor<float>&, const Tensor<float>&);
template Tensor<double> feature_loss(const Tensor<double>&, const Tensor<double>&);

}  // namespace ppocr
