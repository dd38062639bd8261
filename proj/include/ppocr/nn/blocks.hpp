#ifndef PPOCR_NN_BLOCKS_HPP_
#define PPOCR_NN_BLOCKS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ppocr/nn/param_store.hpp"
#include "ppocr/tensor/ops.hpp"

namespace ppocr {

enum class BlockKind { stem_conv, depth_sep_conv, gap, conv1x1_1280, head };

std::string_view block_kind_name(BlockKind kind);

struct BlockSpec {
  BlockKind kind = BlockKind::depth_sep_conv;
  int kernel_size = 3;
  IntPair stride{1, 1};
  int channels_out = 0;
  bool use_se = false;
  Activation activation = Activation::hswish;
};

inline constexpr int kSeReduction = 4;
inline constexpr int kLastConvChannels = 1280;

// Rounds to the nearest multiple of `divisor` (at least `divisor`), adding
// one more step when rounding lost more than 10%.
int make_divisible(double value, int divisor = 8);

// Throws std::invalid_argument when a block list breaks the structural
// rules: kernel sizes in {3, 5}, SE only on depthwise-separable blocks, and
// in classifier lists exactly one gap, directly before the 1280 conv.
void validate_blocks(const std::vector<BlockSpec>& blocks, bool classifier);

// Squeeze-and-excitation weights for `channels` channels.
template <typename T>
struct SeParams {
  Tensor<T> fc1_w, fc1_b, fc2_w, fc2_b;
};

// x * hsigmoid(fc2(relu(fc1(GAP(x))))), broadcast per channel.
template <typename T>
Tensor<T> se_block(const Tensor<T>& x, const SeParams<T>& p);

// Registers SE weights under `prefix` and returns handles to them.
// Rejects channel counts not divisible by `reduction`.
template <typename T>
SeParams<T> add_se_params(ParamStore<T>& store, ParamInit& init, const std::string& prefix,
                          int channels, int reduction = kSeReduction);

template <typename T>
SeParams<T> se_params_from(const ParamStore<T>& store, const std::string& prefix);

// Ordered blocks plus the named parameters they use.
template <typename T>
class Network {
 public:
  Network() = default;
  Network(std::vector<BlockSpec> blocks, int in_channels, std::uint64_t seed);

  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  int in_channels() const { return in_channels_; }
  ParamStore<T>& params() { return params_; }
  const ParamStore<T>& params() const { return params_; }

  // Channels produced by block `index`.
  int channels_after(std::size_t index) const;

  Tensor<T> forward(const Tensor<T>& x) const { return forward_range(x, 0, blocks_.size()); }
  Tensor<T> forward_range(Tensor<T> x, std::size_t first, std::size_t last) const;

  // Output shape implied by the block list for an NCHW input shape.
  Shape output_shape(const Shape& input) const;

 private:
  std::vector<BlockSpec> blocks_;
  int in_channels_ = 0;
  ParamStore<T> params_;
};

std::string block_param_prefix(std::size_t index);

extern template class Network<float>;
extern template class Network<double>;

}  // namespace ppocr

#endif  // PPOCR_NN_BLOCKS_HPP_
