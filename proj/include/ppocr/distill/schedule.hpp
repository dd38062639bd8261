#ifndef PPOCR_DISTILL_SCHEDULE_HPP_
#define PPOCR_DISTILL_SCHEDULE_HPP_

#include <cstdint>
#include <string_view>

namespace ppocr {

enum class LrSchedule { cosine, piecewise };

LrSchedule parse_schedule(std::string_view name);
std::string_view schedule_name(LrSchedule schedule);

struct TrainConfig {
  double base_lr = 0.001;
  LrSchedule schedule = LrSchedule::piecewise;
  int warmup_epochs = 1;
  int epochs = 10;
  int batch_size = 16;
  std::uint64_t seed = 0;
  double alpha = 5.0;    // binary-map weight in the DB loss
  double beta = 10.0;    // threshold-map weight in the DB loss
  double gamma = 5.0;    // probability-map weight in the distill loss
  double lambda = 0.05;  // center-loss weight
  double dml_weight = 1.0;
  double feat_weight = 1.0;
  double distill_weight = 1.0;
  bool center_loss = false;
  // Piecewise decay happens after this fraction of the epochs.
  double piecewise_boundary = 0.875;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Linear warm-up from 0 over warmup_epochs, then cosine decay to 0 or a
// single tenfold drop at the piecewise boundary epoch.
double lr_at(const TrainConfig& config, std::int64_t step, std::int64_t steps_per_epoch);

// First epoch (0-based) trained at the decayed piecewise rate.
int piecewise_boundary_epoch(const TrainConfig& config);

}  // namespace ppocr

#endif  // PPOCR_DISTILL_SCHEDULE_HPP_
