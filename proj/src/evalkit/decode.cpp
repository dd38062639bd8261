#include "ppocr/evalkit/decode.hpp"

#include <stdexcept>

namespace ppocr {

SeqLabel collapse_path(const std::vector<int>& path) {
  SeqLabel out;
  int prev = -1;
  for (int s : path) {
    if (s != prev && s != kBlankIndex) out.symbols.push_back(s);
    prev = s;
  }
  return out;
}

namespace {

template <typename T>
SeqLabel decode_rows(const T* data, std::size_t steps, std::size_t classes) {
  std::vector<int> path(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const T* row = data + t * classes;
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes; ++c) {
      if (row[c] > row[best]) best = c;
    }
    path[t] = static_cast<int>(best);
  }
  return collapse_path(path);
}

}  // namespace

template <typename T>
SeqLabel greedy_decode(const Tensor<T>& logits) {
  if (logits.ndim() != 2 || logits.dim(1) < 2) {
    throw ShapeError("greedy_decode: expected [T, C] with C >= 2, got " + to_string(logits.shape()));
  }
  return decode_rows(logits.data().data(), logits.dim(0), logits.dim(1));
}

template <typename T>
std::vector<SeqLabel> greedy_decode_batch(const Tensor<T>& logits) {
  if (logits.ndim() != 3 || logits.dim(2) < 2) {
    throw ShapeError("greedy_decode_batch: expected [N, T, C] with C >= 2, got " +
                     to_string(logits.shape()));
  }
  const std::size_t n = logits.dim(0), steps = logits.dim(1), classes = logits.dim(2);
  std::vector<SeqLabel> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(decode_rows(logits.data().data() + i * steps * classes, steps, classes));
  }
  return out;
}

double sentence_accuracy(const std::vector<SeqLabel>& preds, const std::vector<SeqLabel>& gts) {
  if (preds.size() != gts.size()) {
    throw std::invalid_argument("sentence_accuracy: " + std::to_string(preds.size()) +
                                " predictions for " + std::to_string(gts.size()) + " labels");
  }
  if (preds.empty()) return 1.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == gts[i];
  return static_cast<double>(hits) / static_cast<double>(preds.size());
}

template SeqLabel greedy_decode(const Tensor<float>&);
template SeqLabel greedy_decode(const Tensor<double>&);
template std::vector<SeqLabel> greedy_decode_batch(const Tensor<float>&);
template std::vector<SeqLabel> greedy_decode_batch(const Tensor<double>&);

}  // namespace ppocr
