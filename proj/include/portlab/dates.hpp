#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "portlab/errors.hpp"
#include "portlab/util.hpp"

namespace portlab {

// days since 1970-01-01 for a proleptic Gregorian date
inline int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = unsigned(y - era * 400);
  const unsigned doy = (153u * unsigned(m + (m > 2 ? -3 : 9)) + 2u) / 5u + unsigned(d) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + int64_t(doe) - 719468;
}

struct CivilDate {
  int year;
  int month;
  int day;
};

inline CivilDate civil_from_days(int64_t z) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = unsigned(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t y = int64_t(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  return {int(y + (m <= 2)), int(m), int(d)};
}

// "YYYY/MM/DD" -> unix seconds at UTC midnight
inline int64_t parse_date_utc(std::string_view s, const std::string& what) {
  auto parts = split(s, '/');
  if (parts.size() != 3) throw config_error(what + ": expected YYYY/MM/DD, got '" + std::string(s) + "'");
  int y = int(parse_i64(parts[0], what));
  int m = int(parse_i64(parts[1], what));
  int d = int(parse_i64(parts[2], what));
  if (m < 1 || m > 12 || d < 1 || d > 31)
    throw config_error(what + ": impossible calendar date '" + std::string(s) + "'");
  return days_from_civil(y, m, d) * 86400;
}

inline int64_t utc_day_index(int64_t unix_seconds) {
  // floor division, correct for pre-epoch timestamps
  int64_t d = unix_seconds / 86400;
  if (unix_seconds % 86400 < 0) --d;
  return d;
}

// ISO-8601 week: returns (iso_year, week 1..53)
inline std::pair<int, int> iso_week(int64_t unix_seconds) {
  int64_t days = utc_day_index(unix_seconds);
  // 1970-01-01 was a Thursday; ISO weekday Mon=1..Sun=7
  int weekday = int(((days % 7) + 7 + 3) % 7) + 1;
  int64_t thursday = days + (4 - weekday);  // Thursday of this ISO week
  CivilDate th = civil_from_days(thursday);
  int64_t jan1 = days_from_civil(th.year, 1, 1);
  int week = int((thursday - jan1) / 7) + 1;
  return {th.year, week};
}

}  // namespace portlab
