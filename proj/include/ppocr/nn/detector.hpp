#ifndef PPOCR_NN_DETECTOR_HPP_
#define PPOCR_NN_DETECTOR_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "ppocr/losses/db.hpp"
#include "ppocr/nn/param_store.hpp"

namespace ppocr {

inline constexpr double kDbBinarizeK = 50.0;

enum class DetectorPreset { student, teacher };

// "student" or "teacher"; anything else is rejected.
DetectorPreset parse_detector_preset(std::string_view name);
std::string_view detector_preset_name(DetectorPreset preset);

struct DetectorConfig {
  DetectorPreset preset = DetectorPreset::student;
  int in_channels = 1;

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

// Plain conv encoder: one entry per stage, every stage after the first
// starts with a stride-2 conv.
struct DetectorLayout {
  std::vector<int> stage_channels;
  int convs_per_stage = 2;
};
DetectorLayout detector_layout(DetectorPreset preset);

// 1 / (1 + exp(-k (prob - thresh))), elementwise.
template <typename T>
Tensor<T> db_binarize(const Tensor<T>& prob, const Tensor<T>& thresh, double k = kDbBinarizeK);

template <typename T>
struct DetectorOutput {
  ProbMapTriple<T> maps;   // each [N, H, W]
  Tensor<T> prob_logits;   // [N, H, W], pre-sigmoid probability map
};

// Toy DB detector: encoder, top-down nearest-upsample fusion back to input
// resolution, and a 3x3 head producing probability and threshold logits.
template <typename T>
class Detector {
 public:
  Detector(const DetectorConfig& config, std::uint64_t seed);

  const DetectorConfig& config() const { return config_; }
  ParamStore<T>& params() { return params_; }
  const ParamStore<T>& params() const { return params_; }

  // Input side lengths must be multiples of this.
  int size_multiple() const;

  DetectorOutput<T> forward(const Tensor<T>& images) const;

 private:
  DetectorConfig config_;
  DetectorLayout layout_;
  ParamStore<T> params_;
};

template <typename T>
Detector<T> build_db_detector(const DetectorConfig& config, std::uint64_t seed = 0);

extern template class Detector<float>;
extern template class Detector<double>;

}  // namespace ppocr

#endif  // PPOCR_NN_DETECTOR_HPP_
