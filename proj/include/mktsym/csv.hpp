#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mktsym::csv {

// Shortest decimal text that parses back to exactly `x`.
std::string format_number(double x);

// Parses a whole field as a double ('.' decimal point, no thousands
// separators). Returns false on any trailing garbage or empty input.
bool parse_number(std::string_view text, double& out);

// Splits on ',' and trims surrounding blanks and a trailing '\r'. Fields are
// never quoted in the formats this project reads and writes.
std::vector<std::string> split_line(std::string_view line);

}  // namespace mktsym::csv
