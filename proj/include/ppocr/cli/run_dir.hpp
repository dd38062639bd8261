#ifndef PPOCR_CLI_RUN_DIR_HPP_
#define PPOCR_CLI_RUN_DIR_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>

namespace ppocr {

inline constexpr const char* kConfigSnapshot = "config.txt";
inline constexpr const char* kMetricsFile = "metrics.csv";
inline constexpr const char* kFailedMarker = "FAILED";

// Bad flags or inputs; the CLI exits with status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Creates `dir` if absent. An existing non-empty directory is refused
// unless `overwrite`, in which case its contents are removed first.
void prepare_output_dir(const std::filesystem::path& dir, bool overwrite);

// Records why a run stopped; leaves any partial artifacts in place.
void mark_failed(const std::filesystem::path& dir, const std::string& reason);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace ppocr

#endif  // PPOCR_CLI_RUN_DIR_HPP_
