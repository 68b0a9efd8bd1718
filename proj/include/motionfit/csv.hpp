#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace motionfit::csv {

// Splits on commas; no quoting (none of our formats need it).
std::vector<std::string> split(std::string_view line);

std::optional<double> parse_double(std::string_view field);

// Fixed-point rendering with `digits` fractional digits; never emits "-0.000...".
std::string fixed(double value, int digits = 6);

// Reads one logical line, stripping a trailing '\r'. Returns false at EOF.
bool read_line(std::istream& in, std::string& line);

// Reads the header and checks it against the expected column list.
// Throws motionfit::Error naming the mismatch.
void expect_header(std::istream& in, std::string_view expected);

}  // namespace motionfit::csv
