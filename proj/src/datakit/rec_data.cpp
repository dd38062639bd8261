#include "ppocr/datakit/rec_data.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ppocr {

std::vector<RecSample> gen_rec_dataset(const Charset& charset, int count,
                                       std::pair<int, int> length_range, std::uint64_t seed,
                                       double noise_level, RecImageSize size) {
  if (charset.empty()) throw std::invalid_argument("gen_rec_dataset: empty charset");
  if (count < 1) throw std::invalid_argument("gen_rec_dataset: count must be >= 1");
  auto [min_len, max_len] = length_range;
  if (min_len < 1 || max_len < min_len) {
    throw std::invalid_argument("gen_rec_dataset: bad length range");
  }
  if (text_width(std::string(static_cast<std::size_t>(max_len), '0')) > size.width ||
      kGlyphHeight > size.height) {
    throw std::invalid_argument("gen_rec_dataset: longest text does not fit the image");
  }
  if (noise_level < 0) throw std::invalid_argument("gen_rec_dataset: negative noise level");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> length(min_len, max_len);
  std::uniform_int_distribution<std::size_t> symbol(0, charset.size() - 1);
  std::uniform_int_distribution<int> background(0, 60);
  std::uniform_int_distribution<int> ink(180, 255);
  std::normal_distribution<double> noise(0.0, noise_level * 255.0);

  std::vector<RecSample> samples;
  samples.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    RecSample s;
    const int len = length(rng);
    for (int i = 0; i < len; ++i) s.text.push_back(charset.symbols()[symbol(rng)]);
    s.label = charset.encode(s.text);
    s.image = Image(size.height, size.width, 1, static_cast<std::uint8_t>(background(rng)));
    const int x = std::uniform_int_distribution<int>(0, size.width - text_width(s.text))(rng);
    const int y = std::uniform_int_distribution<int>(0, size.height - kGlyphHeight)(rng);
    draw_text(s.image, x, y, s.text, static_cast<std::uint8_t>(ink(rng)));
    if (noise_level > 0) {
      for (auto& p : s.image.pixels) {
        p = static_cast<std::uint8_t>(std::clamp(std::lround(p + noise(rng)), 0L, 255L));
      }
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace ppocr
