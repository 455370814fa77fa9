#include "geolab/csv.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "geolab/errors.hpp"

namespace geolab::csv {

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

void expect_header(std::istream& in, std::string_view expected) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing header, expected '" + std::string(expected) + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) {
    throw ParseError(1, "unexpected header '" + line + "', expected '" + std::string(expected) + "'");
  }
}

bool next_row(std::istream& in, std::string& line, std::size_t& line_number) {
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

double parse_real(std::string_view field, std::size_t line_number) {
  const std::string s(field);
  if (s.empty()) throw ParseError(line_number, "empty numeric field");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw ParseError(line_number, "not a real number: '" + s + "'");
  }
  return v;
}

std::int64_t parse_int(std::string_view field, std::size_t line_number) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(line_number, "not an integer: '" + std::string(field) + "'");
  }
  return v;
}

bool parse_bool(std::string_view field, std::size_t line_number) {
  if (field == "1" || field == "true") return true;
  if (field == "0" || field == "false") return false;
  throw ParseError(line_number, "not a boolean: '" + std::string(field) + "'");
}

}  // namespace geolab::csv
