#include "ppocr/cli/run_dir.hpp"

#include <fstream>

namespace ppocr {

namespace fs = std::filesystem;

void prepare_output_dir(const fs::path& dir, bool overwrite) {
  if (dir.empty()) throw UsageError("output directory not given");
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw UsageError(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir)) {
      if (!overwrite) {
        throw UsageError(dir.string() + " already holds a run; pass --overwrite to replace it");
      }
      for (const auto& entry : fs::directory_iterator(dir)) fs::remove_all(entry.path());
    }
  }
  fs::create_directories(dir);
}

void mark_failed(const fs::path& dir, const std::string& reason) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return;
  std::ofstream out(dir / kFailedMarker, std::ios::trunc);
  out << reason << '\n';
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + file.string());
}

}  // namespace ppocr
