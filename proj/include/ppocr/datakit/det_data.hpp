#ifndef PPOCR_DATAKIT_DET_DATA_HPP_
#define PPOCR_DATAKIT_DET_DATA_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ppocr/datakit/geometry.hpp"
#include "ppocr/datakit/image.hpp"
#include "ppocr/losses/db.hpp"

namespace ppocr {

struct TextInstance {
  Polygon polygon;
  std::string transcription;
  Image patch;  // crop over the polygon's pixel bounding box
};

struct DetSample {
  Image image;
  std::vector<TextInstance> instances;
  DetGroundTruth<float> targets;  // [H, W] maps
};

struct DetImageSize {
  int height = 32;
  int width = 32;
};

// Padding in pixels between a text block's glyphs and its polygon.
inline constexpr int kTextBlockPadding = 2;

// Integer pixel range covered by a polygon: [x0, x1) x [y0, y1), clipped.
struct PixelRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};
PixelRect pixel_bounds(const Polygon& poly, int height, int width);

// Crops the bounding box of `poly` from `image`.
Image crop_patch(const Image& image, const Polygon& poly);

// Places non-overlapping text blocks of 1-3 glyphs; the number of blocks
// per image is uniform in instances_range. When a block cannot be placed
// the image simply holds fewer blocks.
std::vector<DetSample> gen_det_dataset(int count, std::pair<int, int> instances_range,
                                       std::uint64_t seed, DetImageSize size = {});

// Recomputes targets (and patches) from the instance polygons.
void refresh_targets(DetSample& sample);

}  // namespace ppocr

#endif  // PPOCR_DATAKIT_DET_DATA_HPP_
