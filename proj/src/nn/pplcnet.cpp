#include "ppocr/nn/pplcnet.hpp"

#include <stdexcept>

namespace ppocr {

namespace {

struct DsRow {
  int kernel, channels, stride;
  bool se;
};

// Channel widths are given at scale 1.0.
constexpr DsRow kDepthSepRows[] = {
    {3, 32, 1, false},                                                          // stage 2
    {3, 64, 2, false},  {3, 64, 1, false},                                      // stage 3
    {3, 128, 2, false}, {3, 128, 1, false},                                     // stage 4
    {3, 256, 2, false}, {5, 256, 1, false}, {5, 256, 1, false},                 // stage 5
    {5, 256, 1, false}, {5, 256, 1, false}, {5, 256, 1, false},
    {5, 512, 2, true},  {5, 512, 1, true},                                      // stage 6
};

constexpr int kStemChannels = 16;

}  // namespace

std::vector<BlockSpec> pplcnet_blocks(double scale, int num_classes) {
  if (!(scale > 0.0)) throw std::invalid_argument("PP-LCNet scale must be positive");
  if (num_classes < 1) throw std::invalid_argument("PP-LCNet needs at least one class");
  std::vector<BlockSpec> blocks;
  blocks.push_back({BlockKind::stem_conv, 3, IntPair(2), make_divisible(kStemChannels * scale),
                    false, Activation::hswish});
  for (const auto& row : kDepthSepRows) {
    blocks.push_back({BlockKind::depth_sep_conv, row.kernel, IntPair(row.stride),
                      make_divisible(row.channels * scale), row.se, Activation::hswish});
  }
  blocks.push_back({BlockKind::gap, 3, IntPair(1), 0, false, Activation::identity});
  blocks.push_back(
      {BlockKind::conv1x1_1280, 3, IntPair(1), kLastConvChannels, false, Activation::hswish});
  blocks.push_back({BlockKind::head, 3, IntPair(1), num_classes, false, Activation::identity});
  validate_blocks(blocks, true);
  return blocks;
}

template <typename T>
Network<T> build_pplcnet(double scale, int in_channels, int num_classes, std::uint64_t seed) {
  return Network<T>(pplcnet_blocks(scale, num_classes), in_channels, seed);
}

template Network<float> build_pplcnet(double, int, int, std::uint64_t);
template Network<double> build_pplcnet(double, int, int, std::uint64_t);

}  // namespace ppocr
