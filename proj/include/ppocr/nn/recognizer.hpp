#ifndef PPOCR_NN_RECOGNIZER_HPP_
#define PPOCR_NN_RECOGNIZER_HPP_

#include <cstdint>

#include "ppocr/nn/blocks.hpp"

namespace ppocr {

struct RecognizerConfig {
  int in_channels = 1;
  int input_height = 16;
  int input_width = 64;
  int seq_len = 32;      // T; input_width / seq_len must be 2, 4, 8 or 16
  int num_classes = 11;  // C, blank included
  double scale = 1.0;
  int head_hidden = 64;

  friend bool operator==(const RecognizerConfig&, const RecognizerConfig&) = default;
};

// Throws std::invalid_argument for C < 2 or an unsupported geometry.
void validate(const RecognizerConfig& config);

// Backbone blocks for the recognizer: a toy PP-LCNet whose horizontal
// strides multiply to input_width / seq_len.
std::vector<BlockSpec> recognizer_backbone_blocks(const RecognizerConfig& config);

template <typename T>
struct RecognizerOutput {
  Tensor<T> logits;    // [N, T, C]
  Tensor<T> features;  // [N, T, D], sequence features entering the head
};

// Backbone -> mean over height -> per-timestep features -> FC, ReLU, FC.
template <typename T>
class Recognizer {
 public:
  Recognizer(const RecognizerConfig& config, std::uint64_t seed);

  const RecognizerConfig& config() const { return config_; }
  const Network<T>& backbone() const { return net_; }
  ParamStore<T>& params() { return net_.params(); }
  const ParamStore<T>& params() const { return net_.params(); }
  // Width D of the sequence features.
  int feature_dim() const;

  // images [N, in_channels, H, W] with W = input_width.
  RecognizerOutput<T> forward(const Tensor<T>& images) const;

 private:
  RecognizerConfig config_;
  Network<T> net_;  // backbone blocks plus the head.fc1/head.fc2 parameters
};

template <typename T>
Recognizer<T> build_crnn_recognizer(const RecognizerConfig& config, std::uint64_t seed = 0);

// Paired outputs of two identically configured recognizers on one batch.
template <typename T>
struct DistillBundle {
  Tensor<T> s_hout, t_hout;  // head logits [N, T, C]
  Tensor<T> s_bout, t_bout;  // sequence features [N, T, D]
};

// Rejects mismatched configurations and networks sharing a parameter tensor.
template <typename T>
DistillBundle<T> forward_pair(const Recognizer<T>& student, const Recognizer<T>& teacher,
                              const Tensor<T>& images);

extern template class Recognizer<float>;
extern template class Recognizer<double>;

}  // namespace ppocr

#endif  // PPOCR_NN_RECOGNIZER_HPP_
