#ifndef PPOCR_EVALKIT_DECODE_HPP_
#define PPOCR_EVALKIT_DECODE_HPP_

#include <vector>

#include "ppocr/losses/seq_label.hpp"
#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

// Collapses repeats and removes blanks from a frame-level path.
SeqLabel collapse_path(const std::vector<int>& path);

// Per-timestep argmax (lowest index on ties), then collapse.
template <typename T>
SeqLabel greedy_decode(const Tensor<T>& logits);  // [T, C]

template <typename T>
std::vector<SeqLabel> greedy_decode_batch(const Tensor<T>& logits);  // [N, T, C]

// Fraction of exact matches; throws for differing list lengths. An empty
// pair of lists scores 1.
double sentence_accuracy(const std::vector<SeqLabel>& preds, const std::vector<SeqLabel>& gts);

}  // namespace ppocr

#endif  // PPOCR_EVALKIT_DECODE_HPP_
