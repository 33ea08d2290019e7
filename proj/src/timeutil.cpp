#include "libexpert/timeutil.hpp"

#include <cstdio>
#include <ctime>

#include "libexpert/errors.hpp"

namespace libexpert {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  std::size_t start = (s[0] == '-') ? 1 : 0;
  if (start == s.size()) return false;
  for (std::size_t i = start; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

}  // namespace

std::int64_t parse_timestamp(std::string_view text) {
  if (all_digits(text)) {
    return std::stoll(std::string(text));
  }
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  const std::string s(text);
  int matched = std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d", &year, &month,
                            &day, &hour, &minute, &second);
  if (matched != 6) {
    matched = std::sscanf(s.c_str(), "%4d-%2d-%2d", &year, &month, &day);
    if (matched != 3) throw ParseError("unrecognized timestamp: " + s, 0);
    hour = minute = second = 0;
  }
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 ||
      minute > 59 || second > 60) {
    throw ParseError("timestamp field out of range: " + s, 0);
  }
  std::tm tm{};
  tm.tm_year = year - 1900;
  tm.tm_mon = month - 1;
  tm.tm_mday = day;
  tm.tm_hour = hour;
  tm.tm_min = minute;
  tm.tm_sec = second;
  const time_t t = timegm(&tm);
  return static_cast<std::int64_t>(t);
}

std::string format_iso8601(std::int64_t unix_seconds) {
  const time_t t = static_cast<time_t>(unix_seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

std::int64_t whole_days_between(std::int64_t from, std::int64_t to) {
  const std::int64_t delta = to - from;
  // Floor division, correct for negative deltas as well.
  std::int64_t q = delta / 86400;
  if (delta % 86400 != 0 && delta < 0) --q;
  return q;
}

}  // namespace libexpert
