#include "ppocr/losses/db.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ppocr/tensor/ops.hpp"

namespace ppocr {

namespace {

template <typename T>
void require_same(const char* op, const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                     to_string(b.shape()));
  }
}

}  // namespace

template <typename T>
Tensor<T> bce_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  require_same("bce_loss", pred, target);
  const std::size_t n = pred.numel();
  if (n == 0) throw ShapeError("bce_loss: empty maps");
  const T lo = static_cast<T>(kBceClamp), hi = static_cast<T>(1.0 - kBceClamp);
  auto p = pred.data(), g = target.data();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = std::clamp(p[i], lo, hi);
    total -= g[i] * std::log(q) + (1.0 - g[i]) * std::log(1.0 - q);
  }
  const T inv = T{1} / static_cast<T>(n);
  return record_op<T>(
      "bce_loss", Shape{}, {static_cast<T>(total) * inv}, {pred, target},
      [pred, target, inv, lo, hi](std::span<const T> gout) mutable {
        auto p = pred.data(), g = target.data();
        const T s = gout[0] * inv;
        if (pred.requires_grad()) {
          auto d = pred.grad_buffer();
          for (std::size_t i = 0; i < d.size(); ++i) {
            if (p[i] <= lo || p[i] >= hi) continue;  // clamped: flat
            d[i] += s * (-g[i] / p[i] + (T{1} - g[i]) / (T{1} - p[i]));
          }
        }
        if (target.requires_grad()) {
          auto d = target.grad_buffer();
          for (std::size_t i = 0; i < d.size(); ++i) {
            const T q = std::clamp(p[i], lo, hi);
            d[i] += s * (std::log(T{1} - q) - std::log(q));
          }
        }
      });
}

template <typename T>
Tensor<T> dice_loss(const Tensor<T>& pred, const Tensor<T>& target) {
  require_same("dice_loss", pred, target);
  auto p = pred.data(), g = target.data();
  double inter = 0.0, sp = 0.0, sg = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    inter += static_cast<double>(p[i]) * g[i];
    sp += p[i];
    sg += g[i];
  }
  const double denom = sp + sg + kDiceSmooth;
  const double value = 1.0 - 2.0 * inter / denom;
  return record_op<T>(
      "dice_loss", Shape{}, {static_cast<T>(value)}, {pred, target},
      [pred, target, inter, denom](std::span<const T> gout) mutable {
        auto p = pred.data(), g = target.data();
        // d/dp_i = -2 (g_i * denom - inter) / denom^2, symmetric for g.
        const double k = -2.0 / (denom * denom);
        if (pred.requires_grad()) {
          auto d = pred.grad_buffer();
          for (std::size_t i = 0; i < d.size(); ++i)
            d[i] += gout[0] * static_cast<T>(k * (g[i] * denom - inter));
        }
        if (target.requires_grad()) {
          auto d = target.grad_buffer();
          for (std::size_t i = 0; i < d.size(); ++i)
            d[i] += gout[0] * static_cast<T>(k * (p[i] * denom - inter));
        }
      });
}

template <typename T>
Tensor<T> masked_l1_loss(const Tensor<T>& pred, const Tensor<T>& target, const Tensor<T>& mask) {
  require_same("masked_l1_loss", pred, target);
  require_same("masked_l1_loss", pred, mask);
  auto p = pred.data(), g = target.data(), m = mask.data();
  double total = 0.0, count = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (m[i] == T{0}) continue;
    total += m[i] * std::abs(static_cast<double>(p[i]) - g[i]);
    count += m[i];
  }
  if (count == 0.0) return Tensor<T>::scalar(T{0});
  const T inv = static_cast<T>(1.0 / count);
  return record_op<T>(
      "masked_l1_loss", Shape{}, {static_cast<T>(total) * inv}, {pred, target},
      [pred, target, mask, inv](std::span<const T> gout) mutable {
        auto p = pred.data(), g = target.data(), m = mask.data();
        const T s = gout[0] * inv;
        auto sign = [](T v) { return v > T{0} ? T{1} : (v < T{0} ? T{-1} : T{0}); };
        if (pred.requires_grad()) {
          auto d = pred.grad_buffer();
          for (std::size_t i = 0; i < d.size(); ++i) d[i] += s * m[i] * sign(p[i] - g[i]);
        }
        if (target.requires_grad()) {
          auto d = target.grad_buffer();
          for (std::size_t i = 0; i < d.size(); ++i) d[i] -= s * m[i] * sign(p[i] - g[i]);
        }
      });
}

template <typename T>
DbGtTerms<T> db_gt_loss(const ProbMapTriple<T>& pred, const DetGroundTruth<T>& gt, double alpha,
                        double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("db_gt_loss: alpha and beta must be positive");
  }
  require_same("db_gt_loss", pred.prob, pred.thresh);
  require_same("db_gt_loss", pred.prob, pred.binary);
  require_same("db_gt_loss", pred.prob, gt.prob_gt);
  require_same("db_gt_loss", pred.prob, gt.thresh_gt);
  require_same("db_gt_loss", pred.prob, gt.thresh_mask);
  DbGtTerms<T> terms;
  terms.l_p = bce_loss(pred.prob, gt.prob_gt);
  terms.l_b = dice_loss(pred.binary, gt.prob_gt);
  terms.l_t = masked_l1_loss(pred.thresh, gt.thresh_gt, gt.thresh_mask);
  auto m = gt.thresh_mask.data();
  terms.empty_mask = std::none_of(m.begin(), m.end(), [](T v) { return v != T{0}; });
  terms.total = add(add(terms.l_p, scale(terms.l_b, static_cast<T>(alpha))),
                    scale(terms.l_t, static_cast<T>(beta)));
  return terms;
}

template <typename T>
Tensor<T> dilate2x2(const Tensor<T>& map) {
  if (map.ndim() < 2) {
    throw ShapeError("dilate2x2: expected at least two axes, got " + to_string(map.shape()));
  }
  const std::size_t h = map.shape()[map.ndim() - 2], w = map.shape()[map.ndim() - 1];
  const std::size_t planes = (h > 0 && w > 0) ? map.numel() / (h * w) : 0;
  std::vector<T> out(map.numel());
  auto in = map.data();
  for (std::size_t p = 0; p < planes; ++p) {
    const T* src = &in[p * h * w];
    T* dst = &out[p * h * w];
    for (std::size_t i = 0; i < h; ++i)
      for (std::size_t j = 0; j < w; ++j) {
        const std::size_t i1 = std::min(i + 1, h - 1), j1 = std::min(j + 1, w - 1);
        dst[i * w + j] = std::max({src[i * w + j], src[i * w + j1], src[i1 * w + j],
                                   src[i1 * w + j1]});
      }
  }
  return Tensor<T>(map.shape(), std::move(out));
}

template <typename T>
DistillTerms<T> distill_loss(const ProbMapTriple<T>& student, const Tensor<T>& teacher_prob,
                             double gamma) {
  require_same("distill_loss", student.prob, teacher_prob);
  require_same("distill_loss", student.binary, teacher_prob);
  // Built from values only: the teacher side is frozen.
  const auto target = dilate2x2(teacher_prob.detach());
  DistillTerms<T> terms;
  terms.l_p = bce_loss(student.prob, target);
  terms.l_b = dice_loss(student.binary, target);
  terms.total = add(scale(terms.l_p, static_cast<T>(gamma)), terms.l_b);
  return terms;
}

#define PPOCR_INSTANTIATE_DB(T)                                                            \
  template Tensor<T> bce_loss(const Tensor<T>&, const Tensor<T>&);                         \
  template Tensor<T> dice_loss(const Tensor<T>&, const Tensor<T>&);                        \
  template Tensor<T> masked_l1_loss(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&); \
  template DbGtTerms<T> db_gt_loss(const ProbMapTriple<T>&, const DetGroundTruth<T>&,      \
                                   double, double);                                        \
  template Tensor<T> dilate2x2(const Tensor<T>&);                                          \
  template DistillTerms<T> distill_loss(const ProbMapTriple<T>&, const Tensor<T>&, double);

PPOCR_INSTANTIATE_DB(float)
PPOCR_INSTANTIATE_DB(double)

}  // namespace ppocr
