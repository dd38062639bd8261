#ifndef PPOCR_LOSSES_CENTER_HPP_
#define PPOCR_LOSSES_CENTER_HPP_

#include <vector>

#include "ppocr/losses/seq_label.hpp"
#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

// One center per class (blank included), C x D, zero-initialised.
template <typename T>
struct CenterBank {
  Tensor<T> centers;
  double momentum = 0.1;

  CenterBank() = default;
  CenterBank(std::size_t num_classes, std::size_t dim, double momentum_ = 0.1);
  std::size_t num_classes() const { return centers.dim(0); }
  std::size_t dim() const { return centers.dim(1); }
};

// Greedy per-row alignment: argmax over classes (first maximum wins).
template <typename T>
std::vector<int> greedy_assignments(const Tensor<T>& head_logits);

// Mean over rows t of ||x_t - c_{y_t}||^2 with y_t = argmax of head_logits
// row t. features [T, D], head_logits [T, C]. Gradient reaches the
// features only; centers and logits are treated as constants.
template <typename T>
Tensor<T> center_loss(const Tensor<T>& features, const Tensor<T>& head_logits,
                      const CenterBank<T>& bank);

// For every class y that received rows:
//   c_y <- c_y - momentum * (c_y - mean of its assigned features).
template <typename T>
void update_centers(CenterBank<T>& bank, const Tensor<T>& features,
                    const std::vector<int>& assignments);

// ctc_loss + lambda * center_loss, both on a single sequence.
template <typename T>
Tensor<T> enhanced_ctc(const Tensor<T>& log_probs, const SeqLabel& label,
                       const Tensor<T>& features, const Tensor<T>& head_logits,
                       const CenterBank<T>& bank, double lambda = 0.05);

}  // namespace ppocr

#endif  // PPOCR_LOSSES_CENTER_HPP_
