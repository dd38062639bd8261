#include "ppocr/datakit/copy_paste.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ppocr {

namespace {

std::uint8_t sample_channel(const Image& patch, int y, int x, int c, int out_channels) {
  if (patch.channels == out_channels) return patch.at(y, x, c);
  if (patch.channels == 1) return patch.at(y, x, 0);
  const int sum = patch.at(y, x, 0) + patch.at(y, x, 1) + patch.at(y, x, 2);
  return static_cast<std::uint8_t>((sum + 1) / 3);
}

// Tries once to place `donor`; returns the placed instance on success.
std::optional<TextInstance> try_place(DetSample& out, const TextInstance& donor,
                                      const std::vector<Box>& occupied, std::mt19937_64& rng,
                                      double max_rotation_deg) {
  const Image& patch = donor.patch;
  const Box src_box = bounding_box(donor.polygon);
  const double sx0 = std::floor(src_box.x0), sy0 = std::floor(src_box.y0);
  const Polygon local = translate(donor.polygon, -sx0, -sy0);
  const Point center{patch.width / 2.0, patch.height / 2.0};

  const double angle = max_rotation_deg > 0
                           ? std::uniform_real_distribution<double>(-max_rotation_deg,
                                                                    max_rotation_deg)(rng)
                           : 0.0;
  const Polygon rotated = rotate(local, center, angle);
  const Box rb = bounding_box(rotated);
  const double fx = std::floor(rb.x0), fy = std::floor(rb.y0);
  const int w2 = static_cast<int>(std::ceil(rb.x1) - fx);
  const int h2 = static_cast<int>(std::ceil(rb.y1) - fy);
  if (w2 > out.image.width || h2 > out.image.height) return std::nullopt;
  const int ox = std::uniform_int_distribution<int>(0, out.image.width - w2)(rng);
  const int oy = std::uniform_int_distribution<int>(0, out.image.height - h2)(rng);

  const Polygon placed = translate(rotated, ox - fx, oy - fy);
  const Box placed_box = bounding_box(placed);
  for (const auto& b : occupied) {
    if (boxes_intersect(placed_box, b)) return std::nullopt;
  }

  const double rad = -angle * std::numbers::pi / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  for (int y = oy; y < oy + h2; ++y) {
    for (int x = ox; x < ox + w2; ++x) {
      const Point c{x + 0.5, y + 0.5};
      if (!point_in_polygon(placed, c)) continue;
      // Back to the unrotated patch frame, nearest neighbour.
      const double lx = c.x - ox + fx - center.x, ly = c.y - oy + fy - center.y;
      const int px = std::clamp(static_cast<int>(std::floor(center.x + cs * lx - sn * ly)), 0,
                                patch.width - 1);
      const int py = std::clamp(static_cast<int>(std::floor(center.y + sn * lx + cs * ly)), 0,
                                patch.height - 1);
      for (int ch = 0; ch < out.image.channels; ++ch) {
        out.image.at(y, x, ch) = sample_channel(patch, py, px, ch, out.image.channels);
      }
    }
  }
  return TextInstance{placed, donor.transcription, {}};
}

}  // namespace

DetSample copy_paste(const DetSample& base, const std::vector<TextInstance>& donors,
                     std::mt19937_64& rng, const CopyPasteOptions& options,
                     CopyPasteStats* stats) {
  DetSample out = base;
  if (donors.empty()) return out;
  std::vector<Box> occupied;
  for (const auto& inst : out.instances) occupied.push_back(bounding_box(inst.polygon));

  CopyPasteStats local;
  for (const auto& donor : donors) {
    ++local.offered;
    std::optional<TextInstance> placed;
    if (!donor.patch.empty()) {
      for (int attempt = 0; attempt < options.max_attempts && !placed; ++attempt) {
        placed = try_place(out, donor, occupied, rng, options.max_rotation_deg);
      }
    }
    if (!placed) {
      ++local.skipped;
      continue;
    }
    ++local.accepted;
    occupied.push_back(bounding_box(placed->polygon));
    out.instances.push_back(std::move(*placed));
  }
  refresh_targets(out);
  if (stats) *stats += local;
  return out;
}

std::vector<TextInstance> harvest_instances(const std::vector<DetSample>& samples) {
  std::vector<TextInstance> pool;
  for (const auto& s : samples) pool.insert(pool.end(), s.instances.begin(), s.instances.end());
  return pool;
}

std::vector<TextInstance> sample_donors(const std::vector<TextInstance>& pool, std::size_t count,
                                        std::mt19937_64& rng) {
  std::vector<TextInstance> out;
  if (pool.empty()) return out;
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (std::size_t i = 0; i < count; ++i) out.push_back(pool[pick(rng)]);
  return out;
}

bool has_overlapping_instances(const DetSample& sample) {
  const auto& inst = sample.instances;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    for (std::size_t j = i + 1; j < inst.size(); ++j) {
      if (convex_polygons_overlap(inst[i].polygon, inst[j].polygon)) return true;
    }
  }
  return false;
}

}  // namespace ppocr
