#ifndef PPOCR_DISTILL_METRICS_LOG_HPP_
#define PPOCR_DISTILL_METRICS_LOG_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ppocr {

// Append-only per-epoch table, written as CSV with a header row. Numbers
// use the shortest text that parses back to the same double.
class MetricsLog {
 public:
  MetricsLog() = default;
  explicit MetricsLog(std::vector<std::string> columns);

  void append(std::vector<double> row);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  std::size_t column_index(std::string_view name) const;  // throws if absent
  double value(std::size_t row, std::string_view column) const;
  std::vector<double> column(std::string_view name) const;

  std::string to_csv() const;
  void write(const std::filesystem::path& path) const;
  static MetricsLog parse_csv(const std::string& text);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

std::string format_number(double value);

}  // namespace ppocr

#endif  // PPOCR_DISTILL_METRICS_LOG_HPP_
