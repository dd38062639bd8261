#include "ppocr/evalkit/boxes.hpp"

#include <algorithm>
#include <stdexcept>

namespace ppocr {

template <typename T>
std::vector<DetBox> boxes_from_probmap(const Tensor<T>& prob, const BoxOptions& options) {
  if (prob.ndim() != 2) {
    throw ShapeError("boxes_from_probmap: expected [H, W], got " + to_string(prob.shape()));
  }
  if (!(options.bin_thresh > 0.0 && options.bin_thresh < 1.0)) {
    throw std::invalid_argument("boxes_from_probmap: bin_thresh must be in (0, 1)");
  }
  const int h = static_cast<int>(prob.dim(0)), w = static_cast<int>(prob.dim(1));
  auto p = prob.data();
  auto at = [&](int y, int x) { return static_cast<std::size_t>(y) * w + x; };
  std::vector<std::uint8_t> visited(p.size(), 0);
  std::vector<DetBox> boxes;
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (visited[at(y, x)] || !(p[at(y, x)] > options.bin_thresh)) continue;
      int x0 = x, x1 = x, y0 = y, y1 = y, count = 0;
      double sum = 0.0;
      visited[at(y, x)] = 1;
      stack.assign(1, {y, x});
      while (!stack.empty()) {
        auto [cy, cx] = stack.back();
        stack.pop_back();
        ++count;
        sum += static_cast<double>(p[at(cy, cx)]);
        x0 = std::min(x0, cx);
        x1 = std::max(x1, cx);
        y0 = std::min(y0, cy);
        y1 = std::max(y1, cy);
        constexpr int dy[4] = {-1, 1, 0, 0}, dx[4] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
          const int ny = cy + dy[k], nx = cx + dx[k];
          if (ny < 0 || nx < 0 || ny >= h || nx >= w) continue;
          const auto i = at(ny, nx);
          if (visited[i] || !(p[i] > options.bin_thresh)) continue;
          visited[i] = 1;
          stack.push_back({ny, nx});
        }
      }
      if (count < options.min_area) continue;
      Box box{double(x0), double(y0), double(x1 + 1), double(y1 + 1)};
      if (options.unclip_ratio > 0) {
        const double perimeter = 2.0 * (box.width() + box.height());
        const double d = box.area() * options.unclip_ratio / perimeter;
        box = {std::max(0.0, box.x0 - d), std::max(0.0, box.y0 - d),
               std::min(double(w), box.x1 + d), std::min(double(h), box.y1 + d)};
      }
      boxes.push_back({box, sum / count});
    }
  }
  return boxes;
}

template std::vector<DetBox> boxes_from_probmap(const Tensor<float>&, const BoxOptions&);
template std::vector<DetBox> boxes_from_probmap(const Tensor<double>&, const BoxOptions&);

}  // namespace ppocr
