#ifndef PPOCR_LOSSES_DB_HPP_
#define PPOCR_LOSSES_DB_HPP_

#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

inline constexpr double kBceClamp = 1e-7;
inline constexpr double kDiceSmooth = 1e-6;

// Detector output. All three maps share one shape ([H, W] or [N, H, W]),
// values in [0, 1].
template <typename T>
struct ProbMapTriple {
  Tensor<T> prob;
  Tensor<T> thresh;
  Tensor<T> binary;
};

// Detection targets: prob_gt in {0, 1}; thresh_gt in [0, 1] and supervised
// only where thresh_mask is 1.
template <typename T>
struct DetGroundTruth {
  Tensor<T> prob_gt;
  Tensor<T> thresh_gt;
  Tensor<T> thresh_mask;
};

// Mean binary cross-entropy; predictions clamped to [1e-7, 1 - 1e-7].
template <typename T>
Tensor<T> bce_loss(const Tensor<T>& pred, const Tensor<T>& target);

// 1 - 2 sum(p g) / (sum p + sum g + 1e-6), over every element.
template <typename T>
Tensor<T> dice_loss(const Tensor<T>& pred, const Tensor<T>& target);

// Mean |pred - target| over elements with mask == 1; zero (no gradient)
// when the mask is empty.
template <typename T>
Tensor<T> masked_l1_loss(const Tensor<T>& pred, const Tensor<T>& target, const Tensor<T>& mask);

template <typename T>
struct DbGtTerms {
  Tensor<T> l_p, l_b, l_t, total;
  bool empty_mask = false;
};

// l_p(prob) + alpha * l_b(binary) + beta * l_t(thresh), against `gt`.
template <typename T>
DbGtTerms<T> db_gt_loss(const ProbMapTriple<T>& pred, const DetGroundTruth<T>& gt,
                        double alpha = 5.0, double beta = 10.0);

inline double combine_db_gt(double l_p, double l_b, double l_t, double alpha, double beta) {
  return l_p + alpha * l_b + beta * l_t;
}

// Grayscale dilation with the 2x2 ones kernel, anchored top-left with edge
// clamping: out[i][j] = max over rows i..i+1, cols j..j+1 inside the map.
// Works on the last two axes. No gradient (applied to frozen teacher maps).
template <typename T>
Tensor<T> dilate2x2(const Tensor<T>& map);

template <typename T>
struct DistillTerms {
  Tensor<T> l_p, l_b, total;
};

// gamma * l_p(student.prob, D) + l_b(student.binary, D) with
// D = dilate2x2(teacher_prob). The teacher map never receives gradient.
template <typename T>
DistillTerms<T> distill_loss(const ProbMapTriple<T>& student, const Tensor<T>& teacher_prob,
                             double gamma = 5.0);

inline double combine_distill(double l_p, double l_b, double gamma) { return gamma * l_p + l_b; }

}  // namespace ppocr

#endif  // PPOCR_LOSSES_DB_HPP_
