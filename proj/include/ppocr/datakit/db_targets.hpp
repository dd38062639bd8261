#ifndef PPOCR_DATAKIT_DB_TARGETS_HPP_
#define PPOCR_DATAKIT_DB_TARGETS_HPP_

#include <vector>

#include "ppocr/datakit/geometry.hpp"
#include "ppocr/losses/db.hpp"

namespace ppocr {

inline constexpr double kShrinkRatio = 0.4;

// Offset distance A (1 - r^2) / L used to shrink and expand a polygon.
double shrink_distance(const Polygon& poly, double ratio = kShrinkRatio);

struct DbTargetStats {
  std::size_t degenerate = 0;  // polygons skipped for zero area
};

// [H, W] maps. A pixel center inside a polygon at distance >= D from its
// boundary gets prob_gt 1. Pixels within D of the boundary (either side)
// form the band: thresh_mask 1, thresh_gt = 1 - d / D. Pixels claimed as
// shrunk text by any polygon are kept out of every band.
DetGroundTruth<float> make_db_targets(const std::vector<Polygon>& polygons, int height, int width,
                                      DbTargetStats* stats = nullptr,
                                      double ratio = kShrinkRatio);

}  // namespace ppocr

#endif  // PPOCR_DATAKIT_DB_TARGETS_HPP_
