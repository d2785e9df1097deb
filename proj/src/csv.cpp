#include "eigsgd/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <cerrno>
#include <stdexcept>
#include <system_error>

#include <fmt/format.h>

namespace eigsgd {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw) {
  const std::string cell = trim(raw);
  if (cell == "nan" || cell == "NaN") return std::nan("");
  if (cell == "inf") return HUGE_VAL;
  if (cell == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    throw std::invalid_argument("not a number in CSV: '" + cell + "'");
  return v;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw std::out_of_range("CSV has no column '" + name + "'");
}

std::vector<double> CsvTable::column_values(const std::string& name) const {
  const std::size_t j = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(j));
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

std::string to_csv_text(const CsvTable& table) {
  std::string out;
  for (const auto& [key, value] : table.metadata) out += fmt::format("# {}: {}\n", key, value);
  std::string header;
  for (std::size_t j = 0; j < table.columns.size(); ++j) header += (j ? "," : "") + table.columns[j];
  out += "# columns: " + header + "\n";
  out += header + "\n";
  const bool iter_first = !table.columns.empty() && table.columns.front() == "iter";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw std::invalid_argument("CSV row width does not match the schema");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      if (j == 0 && iter_first) out += fmt::format("{}", static_cast<long long>(row[j]));
      else out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv_text(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        const std::string key = trim(line.substr(1, colon - 1));
        if (key != "columns") t.metadata.emplace_back(key, trim(line.substr(colon + 1)));
      }
      continue;
    }
    if (!have_header) {
      for (auto& c : split(line, ',')) t.columns.push_back(trim(c));
      have_header = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : split(line, ',')) row.push_back(parse_cell(c));
    if (row.size() != t.columns.size())
      throw std::invalid_argument(fmt::format("CSV row has {} cells, header has {}", row.size(), t.columns.size()));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw std::invalid_argument("CSV has no header row");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::system_error(errno, std::generic_category(), "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv_text(buf.str());
}

std::string csv_body(const std::string& text) {
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) return {};
    pos = nl + 1;
  }
  return text.substr(pos);
}

}  // namespace eigsgd
