#include "ppocr/nn/recognizer.hpp"

#include <stdexcept>

namespace ppocr {

namespace {

constexpr std::uint64_t kHeadSeedSalt = 0x9e3779b97f4a7c15ull;

int horizontal_extra_factor(const RecognizerConfig& c) {
  return c.input_width / c.seq_len / 2;
}

}  // namespace

void validate(const RecognizerConfig& c) {
  if (c.num_classes < 2) {
    throw std::invalid_argument("recognizer needs at least 2 classes (blank plus one symbol)");
  }
  if (c.in_channels < 1 || c.head_hidden < 1 || !(c.scale > 0.0)) {
    throw std::invalid_argument("recognizer: channels, head width and scale must be positive");
  }
  if (c.seq_len < 1 || c.input_width % c.seq_len != 0) {
    throw std::invalid_argument("recognizer: input_width must be a multiple of seq_len");
  }
  const int stride = c.input_width / c.seq_len;
  if (stride != 2 && stride != 4 && stride != 8 && stride != 16) {
    throw std::invalid_argument("recognizer: horizontal stride " + std::to_string(stride) +
                                " not in {2, 4, 8, 16}");
  }
  if (c.input_height < 4) throw std::invalid_argument("recognizer: input_height must be >= 4");
}

std::vector<BlockSpec> recognizer_backbone_blocks(const RecognizerConfig& c) {
  validate(c);
  const int f = horizontal_extra_factor(c);
  // Extra horizontal halvings go to block 2 first, then block 1, then block 3.
  const int s1 = f >= 4 ? 2 : 1;
  const int s2 = f >= 2 ? 2 : 1;
  const int s3 = f >= 8 ? 2 : 1;
  auto ch = [&](int base) { return make_divisible(base * c.scale, 4); };
  return {
      {BlockKind::stem_conv, 3, IntPair(2, 2), ch(8), false, Activation::hswish},
      {BlockKind::depth_sep_conv, 3, IntPair(1, s1), ch(16), false, Activation::hswish},
      {BlockKind::depth_sep_conv, 3, IntPair(2, s2), ch(32), false, Activation::hswish},
      {BlockKind::depth_sep_conv, 5, IntPair(1, s3), ch(48), true, Activation::hswish},
      {BlockKind::depth_sep_conv, 5, IntPair(1, 1), ch(48), true, Activation::hswish},
  };
}

template <typename T>
Recognizer<T>::Recognizer(const RecognizerConfig& config, std::uint64_t seed)
    : config_(config), net_(recognizer_backbone_blocks(config), config.in_channels, seed) {
  ParamInit init(seed ^ kHeadSeedSalt);
  const auto d = static_cast<std::size_t>(feature_dim());
  const auto h = static_cast<std::size_t>(config_.head_hidden);
  const auto c = static_cast<std::size_t>(config_.num_classes);
  auto& p = net_.params();
  p.add("head.fc1.weight", init.kaiming<T>(Shape{h, d}, d));
  p.add("head.fc1.bias", init.zeros<T>(Shape{h}));
  p.add("head.fc2.weight", init.kaiming<T>(Shape{c, h}, h));
  p.add("head.fc2.bias", init.zeros<T>(Shape{c}));
}

template <typename T>
int Recognizer<T>::feature_dim() const {
  return net_.channels_after(net_.blocks().size() - 1);
}

template <typename T>
RecognizerOutput<T> Recognizer<T>::forward(const Tensor<T>& images) const {
  if (images.ndim() != 4 || images.dim(1) != static_cast<std::size_t>(config_.in_channels) ||
      images.dim(3) != static_cast<std::size_t>(config_.input_width)) {
    throw ShapeError("recognizer: expected [N, " + std::to_string(config_.in_channels) +
                     ", H, " + std::to_string(config_.input_width) + "] images, got " +
                     to_string(images.shape()));
  }
  auto fmap = net_.forward(images);                        // [N, D, H', T]
  auto columns = mean_axis(fmap, 2);                       // [N, D, T]
  auto seq = permute(columns, {0, 2, 1});                  // [N, T, D]
  const std::size_t n = seq.dim(0), t = seq.dim(1), d = seq.dim(2);
  const auto& p = net_.params();
  auto flat = reshape(seq, Shape{n * t, d});
  auto hidden = activation(linear(flat, p.at("head.fc1.weight"), p.at("head.fc1.bias")),
                           Activation::relu);
  auto logits = linear(hidden, p.at("head.fc2.weight"), p.at("head.fc2.bias"));
  return {reshape(logits, Shape{n, t, static_cast<std::size_t>(config_.num_classes)}), seq};
}

template <typename T>
Recognizer<T> build_crnn_recognizer(const RecognizerConfig& config, std::uint64_t seed) {
  return Recognizer<T>(config, seed);
}

template <typename T>
DistillBundle<T> forward_pair(const Recognizer<T>& student, const Recognizer<T>& teacher,
                              const Tensor<T>& images) {
  if (!(student.config() == teacher.config())) {
    throw std::invalid_argument("forward_pair: student and teacher configurations differ");
  }
  for (const auto& [name, s] : student.params()) {
    if (s.same_storage(teacher.params().at(name))) {
      throw std::invalid_argument("forward_pair: parameter '" + name + "' is shared");
    }
  }
  auto s = student.forward(images);
  auto t = teacher.forward(images);
  return {s.logits, t.logits, s.features, t.features};
}

template class Recognizer<float>;
template class Recognizer<double>;
template Recognizer<float> build_crnn_recognizer(const RecognizerConfig&, std::uint64_t);
template Recognizer<double> build_crnn_recognizer(const RecognizerConfig&, std::uint64_t);
template DistillBundle<float> forward_pair(const Recognizer<float>&, const Recognizer<float>&,
                                           const Tensor<float>&);
template DistillBundle<double> forward_pair(const Recognizer<double>&, const Recognizer<double>&,
                                            const Tensor<double>&);

}  // namespace ppocr
