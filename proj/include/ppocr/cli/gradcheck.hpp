#ifndef PPOCR_CLI_GRADCHECK_HPP_
#define PPOCR_CLI_GRADCHECK_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace ppocr {

inline constexpr double kGradCheckTolerance = 1e-4;
inline constexpr double kGradCheckEps = 1e-5;

struct GradCheckRow {
  std::string loss;
  int instances = 0;
  double max_rel_err = 0.0;         // over resolvable elements, decides pass/fail
  double strict_max_rel_err = 0.0;  // over every element
  std::size_t elements = 0, kink_skips = 0, noise_skips = 0;
  bool pass() const { return max_rel_err < kGradCheckTolerance; }
};

// ctc, dml, feature, center, enhanced_ctc, db_gt, distill, recognizer.
const std::vector<std::string>& gradcheck_loss_names();

// Finite-difference check of each named loss on `instances` random inputs
// in double precision. `inject_fault` scales every analytic gradient by
// 1.01 so the harness can prove it fails.
std::vector<GradCheckRow> run_gradcheck(const std::vector<std::string>& losses, int instances,
                                        std::uint64_t seed, bool inject_fault = false);

// Header "loss,instances,max_rel_err,strict_max_rel_err,elements,kink_skips,
// noise_skips,status" plus one row per loss.
std::string gradcheck_csv(const std::vector<GradCheckRow>& rows);

}  // namespace ppocr

#endif  // PPOCR_CLI_GRADCHECK_HPP_
