#include "ppocr/nn/blocks.hpp"

#include <stdexcept>

namespace ppocr {

std::string_view block_kind_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::stem_conv: return "stem_conv";
    case BlockKind::depth_sep_conv: return "depth_sep_conv";
    case BlockKind::gap: return "gap";
    case BlockKind::conv1x1_1280: return "conv1x1_1280";
    case BlockKind::head: return "head";
  }
  return "unknown";
}

int make_divisible(double value, int divisor) {
  int rounded = std::max(divisor, static_cast<int>(value + divisor / 2.0) / divisor * divisor);
  if (rounded < 0.9 * value) rounded += divisor;
  return rounded;
}

void validate_blocks(const std::vector<BlockSpec>& blocks, bool classifier) {
  std::size_t gap_count = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    const bool convolutional = b.kind == BlockKind::stem_conv || b.kind == BlockKind::depth_sep_conv;
    if (convolutional && b.kernel_size != 3 && b.kernel_size != 5) {
      throw std::invalid_argument("block " + std::to_string(i) + ": kernel size " +
                                  std::to_string(b.kernel_size) + " not in {3, 5}");
    }
    if (b.use_se && b.kind != BlockKind::depth_sep_conv) {
      throw std::invalid_argument("block " + std::to_string(i) +
                                  ": SE is only allowed on depthwise-separable blocks");
    }
    if (b.kind == BlockKind::gap) {
      ++gap_count;
      if (i + 1 >= blocks.size() || blocks[i + 1].kind != BlockKind::conv1x1_1280) {
        throw std::invalid_argument("gap block must be followed by the 1x1 conv block");
      }
    }
    if (b.kind == BlockKind::conv1x1_1280 && (i == 0 || blocks[i - 1].kind != BlockKind::gap)) {
      throw std::invalid_argument("1x1 conv block must directly follow the gap block");
    }
  }
  if (classifier && gap_count != 1) {
    throw std::invalid_argument("classifier needs exactly one gap block");
  }
}

std::string block_param_prefix(std::size_t index) { return "blocks." + std::to_string(index); }

template <typename T>
Tensor<T> se_block(const Tensor<T>& x, const SeParams<T>& p) {
  if (x.ndim() != 4 || p.fc1_w.dim(1) != x.dim(1)) {
    throw ShapeError("se_block: input " + to_string(x.shape()) + " does not fit SE weights " +
                     to_string(p.fc1_w.shape()));
  }
  const std::size_t n = x.dim(0), c = x.dim(1);
  auto pooled = reshape(global_avg_pool(x), Shape{n, c});
  auto hidden = activation(linear(pooled, p.fc1_w, p.fc1_b), Activation::relu);
  auto gate = activation(linear(hidden, p.fc2_w, p.fc2_b), Activation::hsigmoid);
  return mul_channels(x, reshape(gate, Shape{n, c, 1, 1}));
}

template <typename T>
SeParams<T> add_se_params(ParamStore<T>& store, ParamInit& init, const std::string& prefix,
                          int channels, int reduction) {
  if (reduction < 1 || channels % reduction != 0) {
    throw std::invalid_argument("SE: " + std::to_string(channels) +
                                " channels not divisible by reduction " +
                                std::to_string(reduction));
  }
  const auto c = static_cast<std::size_t>(channels);
  const auto r = c / static_cast<std::size_t>(reduction);
  SeParams<T> p;
  p.fc1_w = store.add(prefix + ".fc1.weight", init.kaiming<T>(Shape{r, c}, c));
  p.fc1_b = store.add(prefix + ".fc1.bias", init.zeros<T>(Shape{r}));
  p.fc2_w = store.add(prefix + ".fc2.weight", init.kaiming<T>(Shape{c, r}, r));
  p.fc2_b = store.add(prefix + ".fc2.bias", init.zeros<T>(Shape{c}));
  return p;
}

template <typename T>
SeParams<T> se_params_from(const ParamStore<T>& store, const std::string& prefix) {
  return {store.at(prefix + ".fc1.weight"), store.at(prefix + ".fc1.bias"),
          store.at(prefix + ".fc2.weight"), store.at(prefix + ".fc2.bias")};
}

template <typename T>
Network<T>::Network(std::vector<BlockSpec> blocks, int in_channels, std::uint64_t seed)
    : blocks_(std::move(blocks)), in_channels_(in_channels) {
  if (in_channels < 1) throw std::invalid_argument("network needs at least one input channel");
  validate_blocks(blocks_, false);
  ParamInit init(seed);
  int channels = in_channels;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    const std::string pre = block_param_prefix(i);
    const auto cin = static_cast<std::size_t>(channels);
    const auto cout = static_cast<std::size_t>(b.channels_out);
    const auto k = static_cast<std::size_t>(b.kernel_size);
    switch (b.kind) {
      case BlockKind::stem_conv:
        params_.add(pre + ".conv.weight", init.kaiming<T>(Shape{cout, cin, k, k}, cin * k * k));
        params_.add(pre + ".conv.bias", init.zeros<T>(Shape{cout}));
        channels = b.channels_out;
        break;
      case BlockKind::depth_sep_conv:
        params_.add(pre + ".dw.weight", init.kaiming<T>(Shape{cin, 1, k, k}, k * k));
        params_.add(pre + ".dw.bias", init.zeros<T>(Shape{cin}));
        if (b.use_se) add_se_params(params_, init, pre + ".se", channels);
        params_.add(pre + ".pw.weight", init.kaiming<T>(Shape{cout, cin, 1, 1}, cin));
        params_.add(pre + ".pw.bias", init.zeros<T>(Shape{cout}));
        channels = b.channels_out;
        break;
      case BlockKind::gap:
        break;
      case BlockKind::conv1x1_1280:
        params_.add(pre + ".conv.weight", init.kaiming<T>(Shape{cout, cin, 1, 1}, cin));
        params_.add(pre + ".conv.bias", init.zeros<T>(Shape{cout}));
        channels = b.channels_out;
        break;
      case BlockKind::head:
        params_.add(pre + ".fc.weight", init.kaiming<T>(Shape{cout, cin}, cin));
        params_.add(pre + ".fc.bias", init.zeros<T>(Shape{cout}));
        channels = b.channels_out;
        break;
    }
  }
}

template <typename T>
int Network<T>::channels_after(std::size_t index) const {
  int channels = in_channels_;
  for (std::size_t i = 0; i <= index && i < blocks_.size(); ++i) {
    if (blocks_[i].kind != BlockKind::gap) channels = blocks_[i].channels_out;
  }
  return channels;
}

template <typename T>
Tensor<T> Network<T>::forward_range(Tensor<T> x, std::size_t first, std::size_t last) const {
  for (std::size_t i = first; i < last && i < blocks_.size(); ++i) {
    const auto& b = blocks_[i];
    const std::string pre = block_param_prefix(i);
    const int pad = b.kernel_size / 2;
    switch (b.kind) {
      case BlockKind::stem_conv:
        x = conv2d(x, params_.at(pre + ".conv.weight"), b.stride, IntPair(pad));
        x = activation(add_channel_bias(x, params_.at(pre + ".conv.bias")), b.activation);
        break;
      case BlockKind::depth_sep_conv: {
        const int groups = static_cast<int>(x.dim(1));
        x = conv2d(x, params_.at(pre + ".dw.weight"), b.stride, IntPair(pad), groups);
        x = activation(add_channel_bias(x, params_.at(pre + ".dw.bias")), b.activation);
        if (b.use_se) x = se_block(x, se_params_from(params_, pre + ".se"));
        x = conv2d(x, params_.at(pre + ".pw.weight"), IntPair(1), IntPair(0));
        x = activation(add_channel_bias(x, params_.at(pre + ".pw.bias")), b.activation);
        break;
      }
      case BlockKind::gap:
        x = global_avg_pool(x);
        break;
      case BlockKind::conv1x1_1280:
        x = conv2d(x, params_.at(pre + ".conv.weight"), IntPair(1), IntPair(0));
        x = activation(add_channel_bias(x, params_.at(pre + ".conv.bias")), b.activation);
        break;
      case BlockKind::head: {
        const std::size_t n = x.dim(0);
        x = reshape(x, Shape{n, x.numel() / n});
        x = linear(x, params_.at(pre + ".fc.weight"), params_.at(pre + ".fc.bias"));
        break;
      }
    }
  }
  return x;
}

template <typename T>
Shape Network<T>::output_shape(const Shape& input) const {
  if (input.size() != 4) throw ShapeError("output_shape: expected NCHW, got " + to_string(input));
  Shape s = input;
  for (const auto& b : blocks_) {
    switch (b.kind) {
      case BlockKind::stem_conv:
      case BlockKind::depth_sep_conv: {
        const std::size_t pad = static_cast<std::size_t>(b.kernel_size / 2);
        const std::size_t k = static_cast<std::size_t>(b.kernel_size);
        s[1] = static_cast<std::size_t>(b.channels_out);
        s[2] = (s[2] + 2 * pad - k) / static_cast<std::size_t>(b.stride.h) + 1;
        s[3] = (s[3] + 2 * pad - k) / static_cast<std::size_t>(b.stride.w) + 1;
        break;
      }
      case BlockKind::gap:
        s[2] = s[3] = 1;
        break;
      case BlockKind::conv1x1_1280:
        s[1] = static_cast<std::size_t>(b.channels_out);
        break;
      case BlockKind::head:
        s = Shape{s[0], static_cast<std::size_t>(b.channels_out)};
        break;
    }
  }
  return s;
}

template class Network<float>;
template class Network<double>;
template Tensor<float> se_block(const Tensor<float>&, const SeParams<float>&);
template Tensor<double> se_block(const Tensor<double>&, const SeParams<double>&);
template SeParams<float> add_se_params(ParamStore<float>&, ParamInit&, const std::string&, int, int);
template SeParams<double> add_se_params(ParamStore<double>&, ParamInit&, const std::string&, int,
                                        int);
template SeParams<float> se_params_from(const ParamStore<float>&, const std::string&);
template SeParams<double> se_params_from(const ParamStore<double>&, const std::string&);

}  // namespace ppocr
