#pragma once

#include <string>
#include <string_view>

namespace npeit {

/// Seventeen significant digits, locale independent.
std::string format_number(double value);

/// Strict decimal parse; the whole token must be consumed.
double parse_number(std::string_view token);
int parse_integer(std::string_view token);

}  // namespace npeit
