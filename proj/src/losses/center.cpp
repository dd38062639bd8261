#include "ppocr/losses/center.hpp"

#include <cmath>
#include <stdexcept>

#include "ppocr/losses/ctc.hpp"
#include "ppocr/tensor/ops.hpp"

namespace ppocr {

template <typename T>
CenterBank<T>::CenterBank(std::size_t num_classes, std::size_t dim, double momentum_)
    : centers(Shape{num_classes, dim}, T{0}), momentum(momentum_) {
  if (momentum < 0.0 || momentum > 1.0) {
    throw std::invalid_argument("center momentum must lie in [0, 1]");
  }
}

template <typename T>
std::vector<int> greedy_assignments(const Tensor<T>& head_logits) {
  if (head_logits.ndim() != 2 || head_logits.dim(1) == 0) {
    throw ShapeError("greedy_assignments: expected [T, C] logits, got " +
                     to_string(head_logits.shape()));
  }
  const std::size_t rows = head_logits.dim(0), classes = head_logits.dim(1);
  auto v = head_logits.data();
  std::vector<int> out(rows, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (v[r * classes + c] > v[r * classes + best]) best = c;
    }
    out[r] = static_cast<int>(best);
  }
  return out;
}

template <typename T>
Tensor<T> center_loss(const Tensor<T>& features, const Tensor<T>& head_logits,
                      const CenterBank<T>& bank) {
  if (features.ndim() != 2 || head_logits.ndim() != 2 || features.dim(0) != head_logits.dim(0)) {
    throw ShapeError("center_loss: features " + to_string(features.shape()) +
                     " and logits " + to_string(head_logits.shape()) + " disagree on rows");
  }
  if (features.dim(1) != bank.dim() || head_logits.dim(1) != bank.num_classes()) {
    throw ShapeError("center_loss: bank " + to_string(bank.centers.shape()) +
                     " does not fit features " + to_string(features.shape()) + " / logits " +
                     to_string(head_logits.shape()));
  }
  const std::size_t rows = features.dim(0), dim = features.dim(1);
  if (rows == 0) throw ShapeError("center_loss: no rows");
  auto assign = greedy_assignments(head_logits);
  auto x = features.data();
  auto c = bank.centers.data();
  // diff[t] = x_t - c_{y_t}; kept for the backward pass.
  std::vector<T> diff(rows * dim);
  T total{0};
  for (std::size_t t = 0; t < rows; ++t) {
    const std::size_t y = static_cast<std::size_t>(assign[t]);
    for (std::size_t d = 0; d < dim; ++d) {
      const T v = x[t * dim + d] - c[y * dim + d];
      diff[t * dim + d] = v;
      total += v * v;
    }
  }
  const T inv = T{1} / static_cast<T>(rows);
  return record_op<T>("center_loss", Shape{}, {total * inv}, {features},
                      [features, diff = std::move(diff), inv](std::span<const T> g) mutable {
                        auto d = features.grad_buffer();
                        const T s = T{2} * inv * g[0];
                        for (std::size_t i = 0; i < d.size(); ++i) d[i] += s * diff[i];
                      });
}

template <typename T>
void update_centers(CenterBank<T>& bank, const Tensor<T>& features,
                    const std::vector<int>& assignments) {
  if (features.ndim() != 2 || features.dim(0) != assignments.size() ||
      features.dim(1) != bank.dim()) {
    throw ShapeError("update_centers: features " + to_string(features.shape()) +
                     " do not fit bank " + to_string(bank.centers.shape()));
  }
  const std::size_t classes = bank.num_classes(), dim = bank.dim();
  std::vector<double> sums(classes * dim, 0.0);
  std::vector<std::size_t> counts(classes, 0);
  auto x = features.data();
  for (std::size_t t = 0; t < assignments.size(); ++t) {
    const auto y = static_cast<std::size_t>(assignments[t]);
    if (y >= classes) throw std::invalid_argument("update_centers: assignment out of range");
    ++counts[y];
    for (std::size_t d = 0; d < dim; ++d) sums[y * dim + d] += x[t * dim + d];
  }
  auto c = bank.centers.data();
  for (std::size_t y = 0; y < classes; ++y) {
    if (counts[y] == 0) continue;
    for (std::size_t d = 0; d < dim; ++d) {
      const double mean = sums[y * dim + d] / static_cast<double>(counts[y]);
      const double cur = c[y * dim + d];
      c[y * dim + d] = static_cast<T>(cur - bank.momentum * (cur - mean));
    }
  }
}

template <typename T>
Tensor<T> enhanced_ctc(const Tensor<T>& log_probs, const SeqLabel& label,
                       const Tensor<T>& features, const Tensor<T>& head_logits,
                       const CenterBank<T>& bank, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("enhanced_ctc: lambda must be non-negative");
  auto ctc = ctc_loss(log_probs, label);
  auto center = center_loss(features, head_logits, bank);
  return add(ctc, scale(center, static_cast<T>(lambda)));
}

template struct CenterBank<float>;
template struct CenterBank<double>;
template std::vector<int> greedy_assignments(const Tensor<float>&);
template std::vector<int> greedy_assignments(const Tensor<double>&);
template Tensor<float> center_loss(const Tensor<float>&, const Tensor<float>&,
                                   const CenterBank<float>&);
template Tensor<double> center_loss(const Tensor<double>&, const Tensor<double>&,
                                    const CenterBank<double>&);
template void update_centers(CenterBank<float>&, const Tensor<float>&, const std::vector<int>&);
template void update_centers(CenterBank<double>&, const Tensor<double>&, const std::vector<int>&);
template Tensor<float> enhanced_ctc(const Tensor<float>&, const SeqLabel&, const Tensor<float>&,
                                    const Tensor<float>&, const CenterBank<float>&, double);
template Tensor<double> enhanced_ctc(const Tensor<double>&, const SeqLabel&,
                                     const Tensor<double>&, const Tensor<double>&,
                                     const CenterBank<double>&, double);

}  // namespace ppocr
