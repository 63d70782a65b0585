#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ctiv::util {

struct CivilDate {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  friend bool operator==(const CivilDate&, const CivilDate&) = default;
};

std::int64_t days_from_civil(const CivilDate& date);
CivilDate civil_from_days(std::int64_t days);

// Accepts "YYYY-MM-DD" or "YYYY/MM/DD", optionally followed by a time part
// (" HH:MM", " HH:MM:SS", "THH:MM:SS", trailing "Z" ignored).
std::optional<CivilDate> parse_date(std::string_view text);

// Unix seconds for the same grammar as parse_date; a missing time part is
// midnight UTC. Pure digit strings are taken as Unix seconds directly.
std::optional<std::int64_t> parse_unix_seconds(std::string_view text);

std::string format_date(const CivilDate& date);

// Current wall clock as an ISO-8601 UTC string, for designated timestamp
// fields only.
std::string utc_now_iso8601();

}  // namespace ctiv::util
