#ifndef PPOCR_LOSSES_DIVERGENCE_HPP_
#define PPOCR_LOSSES_DIVERGENCE_HPP_

#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

inline constexpr double kKlFloor = 1e-10;

// sum_c p log(p / max(q, 1e-10)) along the last axis, averaged over every
// other position. Both inputs must be distributions along the last axis
// (sums within 1e-5 of one); anything else is rejected.
template <typename T>
Tensor<T> kl_div(const Tensor<T>& p, const Tensor<T>& q);

// Symmetric mutual-learning term between two sets of logits:
// (KL(softmax a || softmax b) + KL(softmax b || softmax a)) / 2.
// Gradient reaches both inputs.
template <typename T>
Tensor<T> dml_loss(const Tensor<T>& a_logits, const Tensor<T>& b_logits);

// Per-element Bernoulli logits: z -> [..., 2] holding (z, 0), so that a
// softmax over the last axis yields (sigmoid z, 1 - sigmoid z). Lets
// dml_loss compare two probability maps given by their pre-sigmoid logits.
template <typename T>
Tensor<T> bernoulli_logits(const Tensor<T>& z);

// Mean of squared elementwise differences. Shapes must match exactly.
template <typename T>
Tensor<T> feature_loss(const Tensor<T>& s_feat, const Tensor<T>& t_feat);

}  // namespace ppocr

#endif  // PPOCR_LOSSES_DIVERGENCE_HPP_
