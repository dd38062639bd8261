#include "ppocr/nn/detector.hpp"

#include <stdexcept>
#include <string>

#include "ppocr/tensor/ops.hpp"

namespace ppocr {

namespace {

std::string conv_name(std::size_t stage, int index) {
  return "enc" + std::to_string(stage) + ".conv" + std::to_string(index);
}

template <typename T>
void add_conv(ParamStore<T>& store, ParamInit& init, const std::string& name, int cin, int cout,
              int k) {
  const auto i = static_cast<std::size_t>(cin), o = static_cast<std::size_t>(cout);
  const auto kk = static_cast<std::size_t>(k);
  store.add(name + ".weight", init.kaiming<T>(Shape{o, i, kk, kk}, i * kk * kk));
  store.add(name + ".bias", init.zeros<T>(Shape{o}));
}

template <typename T>
Tensor<T> conv(const ParamStore<T>& store, const std::string& name, const Tensor<T>& x,
               int stride) {
  const auto& w = store.at(name + ".weight");
  const int pad = static_cast<int>(w.dim(2)) / 2;
  return add_channel_bias(conv2d(x, w, IntPair(stride), IntPair(pad)), store.at(name + ".bias"));
}

}  // namespace

DetectorPreset parse_detector_preset(std::string_view name) {
  if (name == "student") return DetectorPreset::student;
  if (name == "teacher") return DetectorPreset::teacher;
  throw std::invalid_argument("unknown detector preset '" + std::string(name) + "'");
}

std::string_view detector_preset_name(DetectorPreset preset) {
  return preset == DetectorPreset::teacher ? "teacher" : "student";
}

DetectorLayout detector_layout(DetectorPreset preset) {
  switch (preset) {
    case DetectorPreset::student: return {{8, 16}, 2};
    case DetectorPreset::teacher: return {{16, 24, 32, 32}, 2};
  }
  throw std::invalid_argument("unknown detector preset");
}

template <typename T>
Tensor<T> db_binarize(const Tensor<T>& prob, const Tensor<T>& thresh, double k) {
  return activation(scale(sub(prob, thresh), static_cast<T>(k)), Activation::sigmoid);
}

template <typename T>
Detector<T>::Detector(const DetectorConfig& config, std::uint64_t seed)
    : config_(config), layout_(detector_layout(config.preset)) {
  if (config.in_channels < 1) throw std::invalid_argument("detector needs an input channel");
  ParamInit init(seed);
  int cin = config.in_channels;
  const auto& ch = layout_.stage_channels;
  for (std::size_t s = 0; s < ch.size(); ++s) {
    for (int j = 0; j < layout_.convs_per_stage; ++j) {
      add_conv(params_, init, conv_name(s, j), cin, ch[s], 3);
      cin = ch[s];
    }
  }
  for (std::size_t s = ch.size() - 1; s > 0; --s) {
    add_conv(params_, init, "lateral" + std::to_string(s), ch[s], ch[s - 1], 1);
  }
  add_conv(params_, init, "head", ch[0], 2, 3);
}

template <typename T>
int Detector<T>::size_multiple() const {
  return 1 << (layout_.stage_channels.size() - 1);
}

template <typename T>
DetectorOutput<T> Detector<T>::forward(const Tensor<T>& images) const {
  const auto m = static_cast<std::size_t>(size_multiple());
  if (images.ndim() != 4 || images.dim(1) != static_cast<std::size_t>(config_.in_channels) ||
      images.dim(2) % m != 0 || images.dim(3) % m != 0) {
    throw ShapeError("detector: expected [N, " + std::to_string(config_.in_channels) +
                     ", H, W] with H, W multiples of " + std::to_string(m) + ", got " +
                     to_string(images.shape()));
  }
  const auto& ch = layout_.stage_channels;
  std::vector<Tensor<T>> skips;
  Tensor<T> x = images;
  for (std::size_t s = 0; s < ch.size(); ++s) {
    for (int j = 0; j < layout_.convs_per_stage; ++j) {
      const int stride = (s > 0 && j == 0) ? 2 : 1;
      x = activation(conv(params_, conv_name(s, j), x, stride), Activation::relu);
    }
    skips.push_back(x);
  }
  for (std::size_t s = ch.size() - 1; s > 0; --s) {
    auto up = conv(params_, "lateral" + std::to_string(s), upsample_nearest(x, 2), 1);
    x = activation(add(up, skips[s - 1]), Activation::relu);
  }
  auto head = conv(params_, "head", x, 1);  // [N, 2, H, W]
  const std::size_t n = head.dim(0), h = head.dim(2), w = head.dim(3);
  auto prob_logits = reshape(narrow(head, 1, 0, 1), Shape{n, h, w});
  auto thresh_logits = reshape(narrow(head, 1, 1, 1), Shape{n, h, w});
  DetectorOutput<T> out;
  out.prob_logits = prob_logits;
  out.maps.prob = activation(prob_logits, Activation::sigmoid);
  out.maps.thresh = activation(thresh_logits, Activation::sigmoid);
  out.maps.binary = db_binarize(out.maps.prob, out.maps.thresh);
  return out;
}

template <typename T>
Detector<T> build_db_detector(const DetectorConfig& config, std::uint64_t seed) {
  return Detector<T>(config, seed);
}

template class Detector<float>;
template class Detector<double>;
template Detector<float> build_db_detector(const DetectorConfig&, std::uint64_t);
template Detector<double> build_db_detector(const DetectorConfig&, std::uint64_t);
template Tensor<float> db_binarize(const Tensor<float>&, const Tensor<float>&, double);
template Tensor<double> db_binarize(const Tensor<double>&, const Tensor<double>&, double);

}  // namespace ppocr
