#include "ppocr/distill/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ppocr {

LrSchedule parse_schedule(std::string_view name) {
  if (name == "cosine") return LrSchedule::cosine;
  if (name == "piecewise") return LrSchedule::piecewise;
  throw std::invalid_argument("unknown schedule '" + std::string(name) + "'");
}

std::string_view schedule_name(LrSchedule schedule) {
  return schedule == LrSchedule::cosine ? "cosine" : "piecewise";
}

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("train config: " + what); };
  if (!(base_lr > 0)) fail("base_lr must be > 0");
  if (epochs < 1) fail("epochs must be >= 1");
  if (warmup_epochs < 0 || warmup_epochs >= epochs) fail("warmup_epochs must be in [0, epochs)");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (alpha < 0 || beta < 0 || gamma < 0 || lambda < 0) fail("loss weights must be >= 0");
  if (dml_weight < 0 || feat_weight < 0 || distill_weight < 0) fail("term weights must be >= 0");
  if (!(piecewise_boundary > 0 && piecewise_boundary <= 1)) fail("piecewise_boundary must be in (0, 1]");
}

int piecewise_boundary_epoch(const TrainConfig& config) {
  const int boundary = static_cast<int>(std::floor(config.epochs * config.piecewise_boundary));
  return std::max(boundary, config.warmup_epochs);
}

double lr_at(const TrainConfig& config, std::int64_t step, std::int64_t steps_per_epoch) {
  if (step < 0 || steps_per_epoch < 1) throw std::invalid_argument("lr_at: bad step");
  const std::int64_t warm = config.warmup_epochs * steps_per_epoch;
  if (step < warm) return config.base_lr * static_cast<double>(step) / static_cast<double>(warm);
  if (config.schedule == LrSchedule::piecewise) {
    return step < piecewise_boundary_epoch(config) * steps_per_epoch ? config.base_lr
                                                                      : config.base_lr / 10.0;
  }
  const std::int64_t total = config.epochs * steps_per_epoch;
  const double progress =
      std::min(1.0, static_cast<double>(step - warm) / static_cast<double>(total - warm));
  return config.base_lr * (1.0 + std::cos(std::numbers::pi * progress)) / 2.0;
}

}  // namespace ppocr
