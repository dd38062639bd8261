#include "ppocr/datakit/dataset_io.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace ppocr {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

std::string image_name(std::size_t index, int channels) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu.%s", index, channels == 1 ? "pgm" : "ppm");
  return std::string(kImagesDir) + "/" + buf;
}

[[noreturn]] void bad_line(std::size_t line_number, const std::string& what) {
  throw DatasetError("annotation line " + std::to_string(line_number) + ": " + what);
}

}  // namespace

std::string serialize_record(const AnnotationRecord& record) {
  ojson j;
  j["image"] = record.image;
  if (record.text) {
    j["text"] = *record.text;
  } else {
    ojson instances = ojson::array();
    for (const auto& inst : record.instances) {
      ojson points = ojson::array();
      for (const auto& p : inst.points) points.push_back({p.x, p.y});
      instances.push_back({{"points", points}, {"transcription", inst.transcription}});
    }
    j["instances"] = instances;
  }
  return j.dump();
}

AnnotationRecord parse_record(const std::string& line, std::size_t line_number) {
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    bad_line(line_number, std::string("malformed JSON (") + e.what() + ")");
  }
  if (!j.is_object()) bad_line(line_number, "expected a JSON object");
  AnnotationRecord rec;
  if (!j.contains("image") || !j["image"].is_string()) bad_line(line_number, "missing \"image\"");
  rec.image = j["image"].get<std::string>();
  const bool has_text = j.contains("text"), has_instances = j.contains("instances");
  if (has_text == has_instances) {
    bad_line(line_number, "exactly one of \"text\" and \"instances\" is required");
  }
  if (has_text) {
    if (!j["text"].is_string()) bad_line(line_number, "\"text\" must be a string");
    rec.text = j["text"].get<std::string>();
    return rec;
  }
  if (!j["instances"].is_array()) bad_line(line_number, "\"instances\" must be an array");
  for (const auto& ji : j["instances"]) {
    if (!ji.is_object() || !ji.contains("points") || !ji["points"].is_array()) {
      bad_line(line_number, "instance without \"points\"");
    }
    InstanceAnnotation inst;
    for (const auto& jp : ji["points"]) {
      if (!jp.is_array() || jp.size() != 2 || !jp[0].is_number() || !jp[1].is_number()) {
        bad_line(line_number, "points must be [x, y] number pairs");
      }
      inst.points.push_back({jp[0].get<double>(), jp[1].get<double>()});
    }
    if (inst.points.size() < 3) bad_line(line_number, "polygon needs at least 3 points");
    if (ji.contains("transcription")) {
      if (!ji["transcription"].is_string()) bad_line(line_number, "transcription must be a string");
      inst.transcription = ji["transcription"].get<std::string>();
    }
    rec.instances.push_back(std::move(inst));
  }
  return rec;
}

std::vector<AnnotationRecord> read_annotations(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DatasetError("cannot read " + file.string());
  std::vector<AnnotationRecord> records;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(parse_record(line, n));
  }
  return records;
}

void write_annotations(const fs::path& file, const std::vector<AnnotationRecord>& records) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw DatasetError("cannot write " + file.string());
  for (const auto& r : records) out << serialize_record(r) << '\n';
  if (!out) throw DatasetError("write failed for " + file.string());
}

Charset read_charset(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DatasetError("cannot read " + file.string());
  std::vector<char> symbols;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() != 1) {
      throw DatasetError(file.string() + " line " + std::to_string(n) +
                         ": expected exactly one symbol");
    }
    symbols.push_back(line[0]);
  }
  try {
    return Charset(std::move(symbols));
  } catch (const std::invalid_argument& e) {
    throw DatasetError(file.string() + ": " + e.what());
  }
}

void write_charset(const fs::path& file, const Charset& charset) {
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw DatasetError("cannot write " + file.string());
  for (char c : charset.symbols()) out << c << '\n';
}

DatasetKind dataset_kind(const fs::path& dir) {
  const auto records = read_annotations(dir / kLabelsFile);
  if (records.empty()) throw DatasetError(dir.string() + ": no annotations");
  return records.front().text ? DatasetKind::rec : DatasetKind::det;
}

void write_rec_dataset(const fs::path& dir, const std::vector<RecSample>& samples,
                       const Charset& charset) {
  fs::create_directories(dir / kImagesDir);
  std::vector<AnnotationRecord> records;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string name = image_name(i, samples[i].image.channels);
    write_pnm(samples[i].image, dir / name);
    records.push_back({name, samples[i].text, {}});
  }
  write_annotations(dir / kLabelsFile, records);
  write_charset(dir / kCharsetFile, charset);
}

std::vector<RecSample> read_rec_dataset(const fs::path& dir, Charset* charset_out) {
  const Charset charset = read_charset(dir / kCharsetFile);
  const auto records = read_annotations(dir / kLabelsFile);
  std::vector<RecSample> samples;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.text) throw DatasetError(r.image + ": detection annotation in a recognition dataset");
    RecSample s;
    s.image = read_pnm(dir / r.image);
    s.text = *r.text;
    try {
      s.label = charset.encode(s.text);
    } catch (const std::invalid_argument& e) {
      throw DatasetError(r.image + ": " + e.what());
    }
    samples.push_back(std::move(s));
  }
  if (charset_out) *charset_out = charset;
  return samples;
}

void write_det_dataset(const fs::path& dir, const std::vector<DetSample>& samples) {
  fs::create_directories(dir / kImagesDir);
  std::vector<AnnotationRecord> records;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string name = image_name(i, samples[i].image.channels);
    write_pnm(samples[i].image, dir / name);
    AnnotationRecord rec{name, std::nullopt, {}};
    for (const auto& inst : samples[i].instances) {
      rec.instances.push_back({inst.polygon, inst.transcription});
    }
    records.push_back(std::move(rec));
  }
  write_annotations(dir / kLabelsFile, records);
}

std::vector<DetSample> read_det_dataset(const fs::path& dir) {
  const auto records = read_annotations(dir / kLabelsFile);
  std::vector<DetSample> samples;
  for (const auto& r : records) {
    if (r.text) throw DatasetError(r.image + ": recognition annotation in a detection dataset");
    DetSample s;
    s.image = read_pnm(dir / r.image);
    for (const auto& a : r.instances) s.instances.push_back({a.points, a.transcription, {}});
    refresh_targets(s);
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace ppocr
