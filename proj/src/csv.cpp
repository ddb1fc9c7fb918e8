#include "ecodrive/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace ecodrive {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

ParseError::ParseError(const std::string& file, int line, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

ParseError::ParseError(const std::string& file, const std::string& what)
    : std::runtime_error(file + ": " + what) {}

std::vector<CsvRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::vector<CsvRow> rows;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    CsvRow row{line_no, {}};
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.fields.emplace_back(trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_number(std::string_view text, const std::string& file, int line) {
  text = trim(text);
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    throw ParseError(file, line, "expected a number, got '" + std::string(text) + "'");
  }
  return value;
}

bool looks_numeric(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return !text.empty() && ec == std::errc{} && ptr == end && std::isfinite(value);
}

}  // namespace ecodrive
