#ifndef PPOCR_DATAKIT_COPY_PASTE_HPP_
#define PPOCR_DATAKIT_COPY_PASTE_HPP_

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "ppocr/datakit/det_data.hpp"

namespace ppocr {

inline constexpr double kMaxPasteRotationDeg = 10.0;

struct CopyPasteStats {
  std::size_t offered = 0;
  std::size_t accepted = 0;
  std::size_t skipped = 0;

  CopyPasteStats& operator+=(const CopyPasteStats& o) {
    offered += o.offered;
    accepted += o.accepted;
    skipped += o.skipped;
    return *this;
  }
};

struct CopyPasteOptions {
  int max_attempts = 20;
  double max_rotation_deg = kMaxPasteRotationDeg;  // 0 disables rotation
};

// Pastes each donor at a random position (and small rotation) whose
// bounding box misses every existing and previously pasted instance.
// Pixels are copied opaquely inside the donor polygon only.
DetSample copy_paste(const DetSample& base, const std::vector<TextInstance>& donors,
                     std::mt19937_64& rng, const CopyPasteOptions& options = {},
                     CopyPasteStats* stats = nullptr);

// Every instance of every sample; the default global donor pool.
std::vector<TextInstance> harvest_instances(const std::vector<DetSample>& samples);

// Draws `count` donors uniformly with replacement from `pool`.
std::vector<TextInstance> sample_donors(const std::vector<TextInstance>& pool, std::size_t count,
                                        std::mt19937_64& rng);

// True when any two instance polygons overlap with positive area.
bool has_overlapping_instances(const DetSample& sample);

}  // namespace ppocr

#endif  // PPOCR_DATAKIT_COPY_PASTE_HPP_
