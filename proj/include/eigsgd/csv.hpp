#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace eigsgd {

/// Numeric CSV with `#` metadata comments, a `# columns:` schema line and a
/// header row. Floats are written with 17 significant digits; a column named
/// "iter" is written as an integer.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Column index by name; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> column_values(const std::string& name) const;
};

std::string format_double(double x);

std::string to_csv_text(const CsvTable& table);
CsvTable parse_csv_text(const std::string& text);

CsvTable read_csv(const std::filesystem::path& path);

/// Everything after the comment block; what reproducibility comparisons check.
std::string csv_body(const std::string& text);

}  // namespace eigsgd
