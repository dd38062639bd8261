#ifndef PPOCR_LOSSES_CTC_HPP_
#define PPOCR_LOSSES_CTC_HPP_

#include <cstddef>
#include <vector>

#include "ppocr/losses/seq_label.hpp"
#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

// A label of length L with R adjacent repeats needs at least L + R frames.
std::size_t ctc_min_frames(const SeqLabel& label);
bool ctc_feasible(std::size_t frames, const SeqLabel& label);

// Throws std::invalid_argument for blank or out-of-range symbols.
void validate_label(const SeqLabel& label, std::size_t num_classes);

// Negative log-likelihood of `label` under per-frame log-probabilities
// (row-major T x C), with the gradient w.r.t. every log-probability.
// An infeasible label yields nll = +inf, feasible = false and a zero gradient.
struct CtcResult {
  double nll = 0.0;
  bool feasible = true;
  std::vector<double> grad;
};
CtcResult ctc_forward_backward(const double* log_probs, std::size_t frames,
                               std::size_t num_classes, const SeqLabel& label);

// log_probs [T, C] -> scalar. +inf (zero gradient) when T is too short.
template <typename T>
Tensor<T> ctc_loss(const Tensor<T>& log_probs, const SeqLabel& label);

// log_probs [N, T, C]: mean over the feasible samples. Infeasible samples
// contribute nothing; their count is written to `infeasible` when given.
template <typename T>
Tensor<T> ctc_loss_batch(const Tensor<T>& log_probs, const std::vector<SeqLabel>& labels,
                         std::size_t* infeasible = nullptr);

// Exhaustive oracle: -log of the summed probability of every length-T path
// (probs [T, C], plain probabilities) collapsing to `label`. Rejects
// instances with C^T > 1e7.
double ctc_brute_force(const Tensor<double>& probs, const SeqLabel& label);

// Drops repeats, then blanks.
SeqLabel ctc_collapse(const std::vector<int>& path);

}  // namespace ppocr

#endif  // PPOCR_LOSSES_CTC_HPP_
