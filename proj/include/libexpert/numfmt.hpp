#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace libexpert {

// Shortest decimal string that round-trips the double (to_chars).
std::string format_double(double v);

// Strict parsers: the whole string must be consumed. Throw ParseError.
double parse_double(std::string_view s);
std::int64_t parse_int(std::string_view s);

}  // namespace libexpert
