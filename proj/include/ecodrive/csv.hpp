#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ecodrive {

/// Raised for malformed input files. The message always carries the file
/// name and, where applicable, the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, int line, const std::string& what);
  ParseError(const std::string& file, const std::string& what);

  int line() const { return line_; }

 private:
  int line_ = 0;
};

struct CsvRow {
  int line = 0;
  std::vector<std::string> fields;
};

/// Reads a comma-separated file. Blank lines and lines starting with '#' are
/// skipped; fields are whitespace-trimmed.
std::vector<CsvRow> read_csv(const std::filesystem::path& path);

/// Locale-independent decimal parse ('.' separator). Throws ParseError.
double parse_number(std::string_view text, const std::string& file, int line);

/// True when the text parses completely as a finite number.
bool looks_numeric(std::string_view text);

}  // namespace ecodrive
