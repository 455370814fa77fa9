#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace geolab::csv {

// 15 significant digits, shortest of %e/%f (printf %.15g). Any string
// produced here parses back to a double that prints identically.
std::string format_real(double value);

std::vector<std::string> split_line(std::string_view line);

// Reads the header line and throws ParseError unless it equals `expected`.
void expect_header(std::istream& in, std::string_view expected);

// Next non-empty line, with a trailing '\r' removed; false at end of input.
bool next_row(std::istream& in, std::string& line, std::size_t& line_number);

double parse_real(std::string_view field, std::size_t line_number);
std::int64_t parse_int(std::string_view field, std::size_t line_number);
bool parse_bool(std::string_view field, std::size_t line_number);

}  // namespace geolab::csv
