#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace digirr::csv {

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double value);
void append_double(std::string& out, double value);
void append_int(std::string& out, std::int64_t value);

// Splits one line on commas. No quoting support: every file this project
// writes is plain numeric/identifier data.
std::vector<std::string_view> split(std::string_view line);

double parse_double(std::string_view field);
std::int64_t parse_int(std::string_view field);

}  // namespace digirr::csv
