#pragma once

// Output writers. Every artifact self-identifies: CSV files start with a
// "# sqvsim <version> config_hash=<hex>" comment line, JSON reports carry
// "version" and "config_hash" members. Numbers are written at full double
// precision (%.16e) so reruns can be compared byte for byte.

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace sqv {

inline constexpr const char* kVersion = "0.1.0";

// RFC-4180 quoting, LF line endings, header row after the comment line
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& config_hash,
            const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);  // quoting applied here

  static std::string render(double v);

 private:
  std::ofstream out_;
  std::size_t n_cols_;
};

void write_json_report(const std::filesystem::path& path, const nlohmann::json& payload,
                       const std::string& config_hash);

}  // namespace sqv
