#ifndef PPOCR_DATAKIT_DATASET_IO_HPP_
#define PPOCR_DATAKIT_DATASET_IO_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppocr/datakit/det_data.hpp"
#include "ppocr/datakit/font.hpp"
#include "ppocr/datakit/rec_data.hpp"

namespace ppocr {

inline constexpr const char* kLabelsFile = "labels.jsonl";
inline constexpr const char* kCharsetFile = "charset.txt";
inline constexpr const char* kImagesDir = "images";

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DatasetKind { rec, det };

struct InstanceAnnotation {
  std::vector<Point> points;
  std::string transcription;
  friend bool operator==(const InstanceAnnotation&, const InstanceAnnotation&) = default;
};

// One JSON-lines row: an image path plus either a text or instances.
struct AnnotationRecord {
  std::string image;
  std::optional<std::string> text;
  std::vector<InstanceAnnotation> instances;
  friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

std::string serialize_record(const AnnotationRecord& record);
// `line_number` (1-based) is quoted in the error for malformed rows.
AnnotationRecord parse_record(const std::string& line, std::size_t line_number);

std::vector<AnnotationRecord> read_annotations(const std::filesystem::path& file);
void write_annotations(const std::filesystem::path& file,
                       const std::vector<AnnotationRecord>& records);

Charset read_charset(const std::filesystem::path& file);
void write_charset(const std::filesystem::path& file, const Charset& charset);

// Kind of the dataset in `dir`, decided by its first annotation row.
DatasetKind dataset_kind(const std::filesystem::path& dir);

void write_rec_dataset(const std::filesystem::path& dir, const std::vector<RecSample>& samples,
                       const Charset& charset);
std::vector<RecSample> read_rec_dataset(const std::filesystem::path& dir, Charset* charset = nullptr);

void write_det_dataset(const std::filesystem::path& dir, const std::vector<DetSample>& samples);
// Targets and patches are rebuilt from the polygons.
std::vector<DetSample> read_det_dataset(const std::filesystem::path& dir);

}  // namespace ppocr

#endif  // PPOCR_DATAKIT_DATASET_IO_HPP_
