#include "ppocr/distill/metrics_log.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ppocr {

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("format_number failed");
  return std::string(buf, end);
}

MetricsLog::MetricsLog(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("MetricsLog needs at least one column");
}

void MetricsLog::append(std::vector<double> row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument("MetricsLog row has " + std::to_string(row.size()) +
                                " values for " + std::to_string(columns_.size()) + " columns");
  }
  rows_.push_back(std::move(row));
}

std::size_t MetricsLog::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i] == name) return i;
  }
  throw std::out_of_range("MetricsLog has no column '" + std::string(name) + "'");
}

double MetricsLog::value(std::size_t row, std::string_view column) const {
  return rows_.at(row).at(column_index(column));
}

std::vector<double> MetricsLog::column(std::string_view name) const {
  const std::size_t c = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r[c]);
  return out;
}

std::string MetricsLog::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out += (i ? "," : "") + columns_[i];
  }
  out += '\n';
  for (const auto& r : rows_) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_number(r[i]);
    out += '\n';
  }
  return out;
}

void MetricsLog::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_csv();
}

MetricsLog MetricsLog::parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("metrics CSV: missing header");
  std::vector<std::string> columns;
  std::stringstream header(line);
  for (std::string cell; std::getline(header, cell, ',');) columns.push_back(cell);
  MetricsLog log(std::move(columns));
  for (std::size_t n = 2; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) {
      double v = 0;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || p != cell.data() + cell.size()) {
        throw std::invalid_argument("metrics CSV line " + std::to_string(n) + ": bad number '" +
                                    cell + "'");
      }
      row.push_back(v);
    }
    log.append(std::move(row));
  }
  return log;
}

}  // namespace ppocr
