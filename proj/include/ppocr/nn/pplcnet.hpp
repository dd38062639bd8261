#ifndef PPOCR_NN_PPLCNET_HPP_
#define PPOCR_NN_PPLCNET_HPP_

#include <cstdint>
#include <vector>

#include "ppocr/nn/blocks.hpp"

namespace ppocr {

// Classifier layout: standard-conv stem (stride 2), thirteen
// depthwise-separable blocks whose tail uses 5x5 kernels and (last two)
// SE, then GAP, a 1280-channel 1x1 conv, and the classification head.
// All activations are H-Swish. Rejects scale <= 0.
std::vector<BlockSpec> pplcnet_blocks(double scale, int num_classes);

template <typename T>
Network<T> build_pplcnet(double scale, int in_channels, int num_classes, std::uint64_t seed = 0);

}  // namespace ppocr

#endif  // PPOCR_NN_PPLCNET_HPP_
