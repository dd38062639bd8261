#ifndef PPOCR_CLI_CONFIG_FILE_HPP_
#define PPOCR_CLI_CONFIG_FILE_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ppocr/distill/det_training.hpp"
#include "ppocr/distill/schedule.hpp"
#include "ppocr/nn/recognizer.hpp"

namespace ppocr {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key=value settings in first-seen key order; later assignments win.
// Each value remembers where it came from for error messages.
class ConfigMap {
 public:
  struct Entry {
    std::string key;
    std::string value;
    std::string origin;  // "file:line" or "--set"
  };

  void set(const std::string& key, const std::string& value, const std::string& origin);
  std::optional<std::string> get(std::string_view key) const;
  const Entry* find(std::string_view key) const;
  const std::vector<Entry>& entries() const { return entries_; }

  // key=value lines, one per entry, in entry order.
  std::string to_text() const;

 private:
  std::vector<Entry> entries_;
};

// Blank lines and # comments are ignored. Errors name `source` and the line.
ConfigMap parse_config(const std::string& text, const std::string& source);
ConfigMap load_config(const std::filesystem::path& path);

// Applies a "key=value" override from the command line.
void apply_override(ConfigMap& config, const std::string& assignment);

// Every key understood by some command; anything else is rejected.
const std::vector<std::string>& known_config_keys();
void check_known_keys(const ConfigMap& config);

// Typed views. Each reads only the keys it owns; malformed values raise
// ConfigError naming the key's origin.
TrainConfig train_config_from(const ConfigMap& config, TrainConfig base = {});
RecognizerConfig recognizer_config_from(const ConfigMap& config, RecognizerConfig base = {});
DetectorConfig detector_config_from(const ConfigMap& config, DetectorConfig base = {});
DetEvalOptions det_eval_options_from(const ConfigMap& config, DetEvalOptions base = {});

// Writes every typed setting back as text, for the run snapshot.
void store_train_config(ConfigMap& config, const TrainConfig& train);
void store_recognizer_config(ConfigMap& config, const RecognizerConfig& rec);
void store_detector_config(ConfigMap& config, const DetectorConfig& det);

}  // namespace ppocr

#endif  // PPOCR_CLI_CONFIG_FILE_HPP_
