#ifndef PPOCR_DATAKIT_REC_DATA_HPP_
#define PPOCR_DATAKIT_REC_DATA_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ppocr/datakit/font.hpp"
#include "ppocr/datakit/image.hpp"

namespace ppocr {

struct RecSample {
  Image image;  // gray
  SeqLabel label;
  std::string text;
};

struct RecImageSize {
  int height = 16;
  int width = 64;
};

// Glyph strings on a dark background with random horizontal and vertical
// placement and additive Gaussian noise of standard deviation
// noise_level * 255. Lengths are uniform in length_range (inclusive).
std::vector<RecSample> gen_rec_dataset(const Charset& charset, int count,
                                       std::pair<int, int> length_range, std::uint64_t seed,
                                       double noise_level, RecImageSize size = {});

}  // namespace ppocr

#endif  // PPOCR_DATAKIT_REC_DATA_HPP_
