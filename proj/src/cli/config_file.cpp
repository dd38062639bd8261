#include "ppocr/cli/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "ppocr/distill/metrics_log.hpp"

namespace ppocr {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const ConfigMap::Entry& e, const std::string& expected) {
  throw ConfigError(e.origin + ": " + e.key + "=" + e.value + ": expected " + expected);
}

double read_double(const ConfigMap& config, std::string_view key, double fallback) {
  const auto* e = config.find(key);
  if (!e) return fallback;
  double v = 0;
  auto [p, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (ec != std::errc() || p != e->value.data() + e->value.size()) bad_value(*e, "a number");
  return v;
}

long long read_int(const ConfigMap& config, std::string_view key, long long fallback) {
  const auto* e = config.find(key);
  if (!e) return fallback;
  long long v = 0;
  auto [p, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
  if (ec != std::errc() || p != e->value.data() + e->value.size()) bad_value(*e, "an integer");
  return v;
}

bool read_bool(const ConfigMap& config, std::string_view key, bool fallback) {
  const auto* e = config.find(key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1") return true;
  if (e->value == "false" || e->value == "0") return false;
  bad_value(*e, "true or false");
}

template <typename F>
auto read_with(const ConfigMap& config, std::string_view key, F parse,
               decltype(parse(std::string_view{})) fallback, const std::string& expected) {
  const auto* e = config.find(key);
  if (!e) return fallback;
  try {
    return parse(e->value);
  } catch (const std::invalid_argument&) {
    bad_value(*e, expected);
  }
}

}  // namespace

void ConfigMap::set(const std::string& key, const std::string& value, const std::string& origin) {
  for (auto& e : entries_) {
    if (e.key == key) {
      e.value = value;
      e.origin = origin;
      return;
    }
  }
  entries_.push_back({key, value, origin});
}

const ConfigMap::Entry* ConfigMap::find(std::string_view key) const {
  for (const auto& e : entries_) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

std::optional<std::string> ConfigMap::get(std::string_view key) const {
  if (const auto* e = find(key)) return e->value;
  return std::nullopt;
}

std::string ConfigMap::to_text() const {
  std::string out;
  for (const auto& e : entries_) out += e.key + "=" + e.value + "\n";
  return out;
}

ConfigMap parse_config(const std::string& text, const std::string& source) {
  ConfigMap config;
  std::istringstream in(text);
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const std::string origin = source + ":" + std::to_string(n);
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ": expected key=value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ": empty key");
    config.set(key, value, origin);
  }
  check_known_keys(config);
  return config;
}

ConfigMap load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void apply_override(ConfigMap& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set " + assignment + ": expected key=value");
  }
  config.set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "--set");
  check_known_keys(config);
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> keys{
      "base_lr", "schedule", "warmup_epochs", "epochs", "batch_size", "seed", "alpha", "beta",
      "gamma", "lambda", "dml_weight", "feat_weight", "distill_weight", "center_loss",
      "piecewise_boundary", "optimizer", "rec.input_height", "rec.input_width", "rec.seq_len",
      "rec.scale", "rec.head_hidden", "det.preset", "eval.bin_thresh", "eval.min_area",
      "eval.unclip_ratio", "eval.iou_thresh", "data", "val", "teacher_ckpt"};
  return keys;
}

void check_known_keys(const ConfigMap& config) {
  const auto& keys = known_config_keys();
  for (const auto& e : config.entries()) {
    if (std::find(keys.begin(), keys.end(), e.key) == keys.end()) {
      throw ConfigError(e.origin + ": unknown key '" + e.key + "'");
    }
  }
}

TrainConfig train_config_from(const ConfigMap& c, TrainConfig t) {
  t.base_lr = read_double(c, "base_lr", t.base_lr);
  t.schedule = read_with(c, "schedule", parse_schedule, t.schedule, "cosine or piecewise");
  t.warmup_epochs = static_cast<int>(read_int(c, "warmup_epochs", t.warmup_epochs));
  t.epochs = static_cast<int>(read_int(c, "epochs", t.epochs));
  t.batch_size = static_cast<int>(read_int(c, "batch_size", t.batch_size));
  const long long seed = read_int(c, "seed", static_cast<long long>(t.seed));
  if (seed < 0) bad_value(*c.find("seed"), "a non-negative integer");
  t.seed = static_cast<std::uint64_t>(seed);
  t.alpha = read_double(c, "alpha", t.alpha);
  t.beta = read_double(c, "beta", t.beta);
  t.gamma = read_double(c, "gamma", t.gamma);
  t.lambda = read_double(c, "lambda", t.lambda);
  t.dml_weight = read_double(c, "dml_weight", t.dml_weight);
  t.feat_weight = read_double(c, "feat_weight", t.feat_weight);
  t.distill_weight = read_double(c, "distill_weight", t.distill_weight);
  t.center_loss = read_bool(c, "center_loss", t.center_loss);
  t.piecewise_boundary = read_double(c, "piecewise_boundary", t.piecewise_boundary);
  if (const auto* e = c.find("optimizer"); e && e->value != "adam") bad_value(*e, "adam");
  // An implicit warm-up never swallows a short run.
  if (!c.find("warmup_epochs")) t.warmup_epochs = std::min(t.warmup_epochs, std::max(0, t.epochs - 1));
  try {
    t.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
  return t;
}

RecognizerConfig recognizer_config_from(const ConfigMap& c, RecognizerConfig r) {
  r.input_height = static_cast<int>(read_int(c, "rec.input_height", r.input_height));
  r.input_width = static_cast<int>(read_int(c, "rec.input_width", r.input_width));
  r.seq_len = static_cast<int>(read_int(c, "rec.seq_len", r.seq_len));
  r.scale = read_double(c, "rec.scale", r.scale);
  r.head_hidden = static_cast<int>(read_int(c, "rec.head_hidden", r.head_hidden));
  return r;
}

DetectorConfig detector_config_from(const ConfigMap& c, DetectorConfig d) {
  d.preset = read_with(c, "det.preset", parse_detector_preset, d.preset, "student or teacher");
  return d;
}

DetEvalOptions det_eval_options_from(const ConfigMap& c, DetEvalOptions o) {
  o.boxes.bin_thresh = read_double(c, "eval.bin_thresh", o.boxes.bin_thresh);
  o.boxes.min_area = static_cast<int>(read_int(c, "eval.min_area", o.boxes.min_area));
  o.boxes.unclip_ratio = read_double(c, "eval.unclip_ratio", o.boxes.unclip_ratio);
  o.iou_thresh = read_double(c, "eval.iou_thresh", o.iou_thresh);
  return o;
}

void store_train_config(ConfigMap& c, const TrainConfig& t) {
  const std::string o = "snapshot";
  c.set("base_lr", format_number(t.base_lr), o);
  c.set("schedule", std::string(schedule_name(t.schedule)), o);
  c.set("warmup_epochs", std::to_string(t.warmup_epochs), o);
  c.set("epochs", std::to_string(t.epochs), o);
  c.set("batch_size", std::to_string(t.batch_size), o);
  c.set("seed", std::to_string(t.seed), o);
  c.set("alpha", format_number(t.alpha), o);
  c.set("beta", format_number(t.beta), o);
  c.set("gamma", format_number(t.gamma), o);
  c.set("lambda", format_number(t.lambda), o);
  c.set("dml_weight", format_number(t.dml_weight), o);
  c.set("feat_weight", format_number(t.feat_weight), o);
  c.set("distill_weight", format_number(t.distill_weight), o);
  c.set("center_loss", t.center_loss ? "true" : "false", o);
  c.set("piecewise_boundary", format_number(t.piecewise_boundary), o);
  c.set("optimizer", "adam", o);
}

void store_recognizer_config(ConfigMap& c, const RecognizerConfig& r) {
  const std::string o = "snapshot";
  c.set("rec.input_height", std::to_string(r.input_height), o);
  c.set("rec.input_width", std::to_string(r.input_width), o);
  c.set("rec.seq_len", std::to_string(r.seq_len), o);
  c.set("rec.scale", format_number(r.scale), o);
  c.set("rec.head_hidden", std::to_string(r.head_hidden), o);
}

void store_detector_config(ConfigMap& c, const DetectorConfig& d) {
  c.set("det.preset", std::string(detector_preset_name(d.preset)), "snapshot");
}

}  // namespace ppocr
