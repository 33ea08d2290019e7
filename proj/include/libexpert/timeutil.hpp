#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace libexpert {

// Accepts "YYYY-MM-DDTHH:MM:SSZ", "YYYY-MM-DD" (midnight UTC) or a bare
// integer of Unix seconds. Throws ParseError otherwise.
std::int64_t parse_timestamp(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ", always UTC.
std::string format_iso8601(std::int64_t unix_seconds);

// Whole days from `from` to `to`: floor((to - from) / 86400).
std::int64_t whole_days_between(std::int64_t from, std::int64_t to);

}  // namespace libexpert
