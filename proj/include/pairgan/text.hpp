#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pairgan {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
/// Fixed-point with `digits` decimals.
std::string format_fixed(double v, int digits);

double parse_double(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace pairgan
