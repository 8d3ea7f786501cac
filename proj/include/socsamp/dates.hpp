#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace socsamp {

// Calendar days counted from 1970-01-01 (civil calendar, no time zones).
using Day = std::int64_t;

inline std::optional<Day> parse_date(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  char buf[11];
  std::snprintf(buf, sizeof buf, "%.*s", static_cast<int>(iso.size()), iso.data());
  if (std::sscanf(buf, "%4d-%2d-%2d", &y, &m, &d) != 3) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                  std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) return std::nullopt;
  return std::chrono::sys_days{ymd}.time_since_epoch().count();
}

inline std::string format_date(Day day) {
  std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{day}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                unsigned(ymd.day()));
  return buf;
}

// 0 = Sunday ... 6 = Saturday.
inline unsigned weekday_of(Day day) {
  return std::chrono::weekday{std::chrono::sys_days{std::chrono::days{day}}}.c_encoding();
}

inline bool is_weekend(Day day) {
  unsigned wd = weekday_of(day);
  return wd == 0 || wd == 6;
}

inline Day previous_trading_day(Day day) {
  Day d = day - 1;
  while (is_weekend(d)) --d;
  return d;
}

}  // namespace socsamp
