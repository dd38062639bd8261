#include "ppocr/datakit/db_targets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ppocr {

double shrink_distance(const Polygon& poly, double ratio) {
  const double perimeter = polygon_perimeter(poly);
  if (perimeter <= 0) return 0.0;
  return polygon_area(poly) * (1.0 - ratio * ratio) / perimeter;
}

DetGroundTruth<float> make_db_targets(const std::vector<Polygon>& polygons, int height, int width,
                                      DbTargetStats* stats, double ratio) {
  if (height < 0 || width < 0) throw std::invalid_argument("make_db_targets: negative size");
  const auto h = static_cast<std::size_t>(height), w = static_cast<std::size_t>(width);
  std::vector<float> prob(h * w, 0.0f), thresh(h * w, 0.0f);
  std::vector<std::uint8_t> band(h * w, 0);
  std::size_t degenerate = 0;
  for (const auto& poly : polygons) {
    if (poly.size() < 3 || polygon_area(poly) <= 1e-9) {
      ++degenerate;
      continue;
    }
    const double dist = shrink_distance(poly, ratio);
    const Box box = bounding_box(poly);
    const int y0 = std::max(0, static_cast<int>(std::floor(box.y0 - dist)));
    const int y1 = std::min(height, static_cast<int>(std::ceil(box.y1 + dist)) + 1);
    const int x0 = std::max(0, static_cast<int>(std::floor(box.x0 - dist)));
    const int x1 = std::min(width, static_cast<int>(std::ceil(box.x1 + dist)) + 1);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const Point center{x + 0.5, y + 0.5};
        const double d = distance_to_boundary(poly, center);
        const std::size_t i = static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x);
        if (point_in_polygon(poly, center) && d >= dist) {
          prob[i] = 1.0f;
        } else if (d < dist) {
          band[i] = 1;
          thresh[i] = std::max(thresh[i], static_cast<float>(1.0 - d / dist));
        }
      }
    }
  }
  std::vector<float> mask(h * w, 0.0f);
  for (std::size_t i = 0; i < h * w; ++i) {
    if (band[i] && prob[i] == 0.0f) {
      mask[i] = 1.0f;
    } else {
      thresh[i] = 0.0f;
    }
  }
  if (stats) stats->degenerate += degenerate;
  const Shape shape{h, w};
  return {Tensor<float>(shape, std::move(prob)), Tensor<float>(shape, std::move(thresh)),
          Tensor<float>(shape, std::move(mask))};
}

}  // namespace ppocr
