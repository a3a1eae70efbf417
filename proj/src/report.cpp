#include "sqv/report.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <stdexcept>

namespace sqv {

namespace {

std::string quoted(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
                     const std::vector<std::string>& columns)
    : n_cols_(columns.size()) {
  if (columns.empty()) throw std::invalid_argument("csv: no columns");
  out_.open(path, std::ios::binary);
  if (!out_) throw std::runtime_error("csv: cannot open '" + path.string() + "'");
  out_ << "# sqvsim " << kVersion << " config_hash=" << config_hash << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << (i ? "," : "") << quoted(columns[i]);
  out_ << "\n";
}

std::string CsvWriter::render(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != n_cols_) throw std::invalid_argument("csv: row width != header width");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << render(values[i]);
  out_ << "\n";
  if (!out_) throw std::runtime_error("csv: write failed");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != n_cols_) throw std::invalid_argument("csv: row width != header width");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << quoted(cells[i]);
  out_ << "\n";
  if (!out_) throw std::runtime_error("csv: write failed");
}

void write_json_report(const std::filesystem::path& path, const nlohmann::json& payload,
                       const std::string& config_hash) {
  nlohmann::json j = payload;
  j["version"] = kVersion;
  j["config_hash"] = config_hash;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("report: cannot open '" + path.string() + "'");
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("report: write failed");
}

}  // namespace sqv
