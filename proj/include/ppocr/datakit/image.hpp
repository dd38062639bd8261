#ifndef PPOCR_DATAKIT_IMAGE_HPP_
#define PPOCR_DATAKIT_IMAGE_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ppocr/tensor/tensor.hpp"

namespace ppocr {

// 8-bit image, row-major, interleaved channels (1 = gray, 3 = RGB).
struct Image {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int h, int w, int c = 1, std::uint8_t fill = 0);

  bool empty() const { return pixels.empty(); }
  std::uint8_t& at(int y, int x, int c = 0) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int y, int x, int c = 0) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool contains(int y, int x) const { return y >= 0 && x >= 0 && y < height && x < width; }

  friend bool operator==(const Image&, const Image&) = default;
};

// Sub-image [y0, y0 + h) x [x0, x0 + w), clipped to the image.
Image crop(const Image& image, int y0, int x0, int h, int w);

// Binary PGM (P5) for gray images, PPM (P6) for RGB.
void write_pnm(const Image& image, const std::filesystem::path& path);
Image read_pnm(const std::filesystem::path& path);

// Stacks same-sized images into [N, C, H, W] with values scaled to [0, 1].
template <typename T>
Tensor<T> images_to_tensor(const std::vector<const Image*>& images);

}  // namespace ppocr

#endif  // PPOCR_DATAKIT_IMAGE_HPP_
