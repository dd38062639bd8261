#include "ppocr/datakit/image.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ppocr {

Image::Image(int h, int w, int c, std::uint8_t fill) : height(h), width(w), channels(c) {
  if (h < 0 || w < 0 || (c != 1 && c != 3)) {
    throw std::invalid_argument("image: bad geometry " + std::to_string(h) + "x" +
                                std::to_string(w) + "x" + std::to_string(c));
  }
  pixels.assign(static_cast<std::size_t>(h) * w * c, fill);
}

Image crop(const Image& image, int y0, int x0, int h, int w) {
  const int ya = std::clamp(y0, 0, image.height), yb = std::clamp(y0 + h, 0, image.height);
  const int xa = std::clamp(x0, 0, image.width), xb = std::clamp(x0 + w, 0, image.width);
  Image out(yb - ya, xb - xa, image.channels);
  for (int y = ya; y < yb; ++y) {
    for (int x = xa; x < xb; ++x) {
      for (int c = 0; c < image.channels; ++c) out.at(y - ya, x - xa, c) = image.at(y, x, c);
    }
  }
  return out;
}

void write_pnm(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << (image.channels == 1 ? "P5" : "P6") << '\n'
      << image.width << ' ' << image.height << '\n'
      << 255 << '\n';
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

namespace {

// Next header token, skipping whitespace and # comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(ch));
  }
  return token;
}

}  // namespace

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const std::string magic = pnm_token(in);
  if (magic != "P5" && magic != "P6") {
    throw std::runtime_error(path.string() + ": not a binary PGM/PPM file");
  }
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(pnm_token(in));
    h = std::stoi(pnm_token(in));
    maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    throw std::runtime_error(path.string() + ": malformed header");
  }
  if (maxval != 255 || w < 0 || h < 0) {
    throw std::runtime_error(path.string() + ": only 8-bit images are supported");
  }
  Image image(h, w, magic == "P5" ? 1 : 3);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.pixels.size())) {
    throw std::runtime_error(path.string() + ": truncated pixel data");
  }
  return image;
}

template <typename T>
Tensor<T> images_to_tensor(const std::vector<const Image*>& images) {
  if (images.empty()) throw std::invalid_argument("images_to_tensor: empty batch");
  const Image& first = *images.front();
  const std::size_t n = images.size(), c = static_cast<std::size_t>(first.channels);
  const std::size_t h = static_cast<std::size_t>(first.height);
  const std::size_t w = static_cast<std::size_t>(first.width);
  std::vector<T> values(n * c * h * w);
  for (std::size_t i = 0; i < n; ++i) {
    const Image& img = *images[i];
    if (img.height != first.height || img.width != first.width || img.channels != first.channels) {
      throw ShapeError("images_to_tensor: image " + std::to_string(i) + " differs in size");
    }
    for (std::size_t ch = 0; ch < c; ++ch) {
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          values[((i * c + ch) * h + y) * w + x] =
              static_cast<T>(img.pixels[(y * w + x) * c + ch]) / T{255};
        }
      }
    }
  }
  return Tensor<T>(Shape{n, c, h, w}, std::move(values));
}

template Tensor<float> images_to_tensor(const std::vector<const Image*>&);
template Tensor<double> images_to_tensor(const std::vector<const Image*>&);

}  // namespace ppocr
