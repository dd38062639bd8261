#ifndef PPOCR_EVALKIT_BOXES_HPP_
#define PPOCR_EVALKIT_BOXES_HPP_

#include <vector>

#include "ppocr/datakit/geometry.hpp"
#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

inline constexpr double kDefaultBinThresh = 0.3;
inline constexpr int kDefaultMinArea = 4;
// Expansion used by the detection evaluation to undo the target shrink.
inline constexpr double kDefaultUnclipRatio = 1.5;

struct DetBox {
  Box box;
  double score = 0.0;
};

struct BoxOptions {
  double bin_thresh = kDefaultBinThresh;
  int min_area = kDefaultMinArea;
  // 0 keeps the raw component box. Otherwise each side grows by
  // A * ratio / L of the component box, clipped to the map.
  double unclip_ratio = 0.0;
};

// Binarizes prob [H, W] at bin_thresh (strictly greater), labels
// 4-connected components and returns the pixel box of each component with
// at least min_area pixels, scored by the mean probability inside it.
// Components are ordered by their first pixel in raster order.
template <typename T>
std::vector<DetBox> boxes_from_probmap(const Tensor<T>& prob, const BoxOptions& options = {});

}  // namespace ppocr

#endif  // PPOCR_EVALKIT_BOXES_HPP_
