#include "ppocr/datakit/det_data.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "ppocr/datakit/db_targets.hpp"
#include "ppocr/datakit/font.hpp"

namespace ppocr {

namespace {

constexpr int kMaxPlacementAttempts = 50;
constexpr int kMaxBlockGlyphs = 3;
constexpr std::string_view kBlockSymbols = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

}  // namespace

PixelRect pixel_bounds(const Polygon& poly, int height, int width) {
  const Box box = bounding_box(poly);
  PixelRect r;
  r.x0 = std::clamp(static_cast<int>(std::floor(box.x0)), 0, width);
  r.y0 = std::clamp(static_cast<int>(std::floor(box.y0)), 0, height);
  r.x1 = std::clamp(static_cast<int>(std::ceil(box.x1)), 0, width);
  r.y1 = std::clamp(static_cast<int>(std::ceil(box.y1)), 0, height);
  return r;
}

Image crop_patch(const Image& image, const Polygon& poly) {
  const PixelRect r = pixel_bounds(poly, image.height, image.width);
  return crop(image, r.y0, r.x0, r.y1 - r.y0, r.x1 - r.x0);
}

void refresh_targets(DetSample& sample) {
  std::vector<Polygon> polygons;
  polygons.reserve(sample.instances.size());
  for (auto& inst : sample.instances) {
    inst.patch = crop_patch(sample.image, inst.polygon);
    polygons.push_back(inst.polygon);
  }
  sample.targets = make_db_targets(polygons, sample.image.height, sample.image.width);
}

std::vector<DetSample> gen_det_dataset(int count, std::pair<int, int> instances_range,
                                       std::uint64_t seed, DetImageSize size) {
  if (count < 1) throw std::invalid_argument("gen_det_dataset: count must be >= 1");
  auto [min_n, max_n] = instances_range;
  if (min_n < 0 || max_n < min_n) throw std::invalid_argument("gen_det_dataset: bad instance range");
  const int block_h = kGlyphHeight + 2 * kTextBlockPadding;
  if (size.height < block_h || size.width < text_width("0") + 2 * kTextBlockPadding) {
    throw std::invalid_argument("gen_det_dataset: image too small for a text block");
  }
  int max_glyphs = kMaxBlockGlyphs;
  while (text_width(std::string(static_cast<std::size_t>(max_glyphs), '0')) +
             2 * kTextBlockPadding > size.width) {
    --max_glyphs;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> n_instances(min_n, max_n);
  std::uniform_int_distribution<int> glyphs(1, max_glyphs);
  std::uniform_int_distribution<std::size_t> symbol(0, kBlockSymbols.size() - 1);
  std::uniform_int_distribution<int> background(0, 50);
  std::uniform_int_distribution<int> ink(170, 255);

  std::vector<DetSample> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    DetSample s;
    s.image = Image(size.height, size.width, 1, static_cast<std::uint8_t>(background(rng)));
    const int wanted = n_instances(rng);
    std::vector<Box> placed;
    for (int k = 0; k < wanted; ++k) {
      std::string text;
      const int len = glyphs(rng);
      for (int i = 0; i < len; ++i) text.push_back(kBlockSymbols[symbol(rng)]);
      const int bw = text_width(text) + 2 * kTextBlockPadding;
      for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
        const int x = std::uniform_int_distribution<int>(0, size.width - bw)(rng);
        const int y = std::uniform_int_distribution<int>(0, size.height - block_h)(rng);
        const Box box{double(x), double(y), double(x + bw), double(y + block_h)};
        // Keep one pixel of background between blocks.
        const Box grown{box.x0 - 1, box.y0 - 1, box.x1 + 1, box.y1 + 1};
        if (std::any_of(placed.begin(), placed.end(),
                        [&](const Box& b) { return boxes_intersect(grown, b); })) {
          continue;
        }
        placed.push_back(box);
        draw_text(s.image, x + kTextBlockPadding, y + kTextBlockPadding, text,
                  static_cast<std::uint8_t>(ink(rng)));
        s.instances.push_back({rectangle(box.x0, box.y0, box.x1, box.y1), text, {}});
        break;
      }
    }
    refresh_targets(s);
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace ppocr
