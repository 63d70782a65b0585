#include "ctiv/util/civil_time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>

namespace ctiv::util {

// Howard Hinnant's days_from_civil / civil_from_days.
std::int64_t days_from_civil(const CivilDate& date) {
  const std::int64_t y = static_cast<std::int64_t>(date.year) - (date.month <= 2 ? 1 : 0);
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned mp = (date.month + 9) % 12;
  const unsigned doy = (153 * mp + 2) / 5 + date.day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t days) {
  days += 719468;
  const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
  const auto doe = static_cast<unsigned>(days - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {static_cast<int>(y + (m <= 2 ? 1 : 0)), m, d};
}

namespace {

bool read_uint(std::string_view text, std::size_t& pos, std::size_t digits, unsigned& out) {
  if (pos + digits > text.size()) return false;
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + digits, value);
  if (ec != std::errc{} || ptr != text.data() + pos + digits) return false;
  out = value;
  pos += digits;
  return true;
}

bool valid_date(const CivilDate& d) {
  static constexpr unsigned kDays[] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (d.month < 1 || d.month > 12 || d.day < 1) return false;
  if (d.day > kDays[d.month - 1]) return false;
  if (d.month == 2 && d.day == 29) {
    const bool leap = (d.year % 4 == 0 && d.year % 100 != 0) || d.year % 400 == 0;
    if (!leap) return false;
  }
  return true;
}

struct Parsed {
  CivilDate date;
  unsigned hour = 0, minute = 0, second = 0;
};

std::optional<Parsed> parse_datetime(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  Parsed out;
  std::size_t pos = 0;
  unsigned year = 0;
  if (!read_uint(text, pos, 4, year)) return std::nullopt;
  if (pos >= text.size() || (text[pos] != '-' && text[pos] != '/')) return std::nullopt;
  const char sep = text[pos++];
  if (!read_uint(text, pos, 2, out.date.month)) return std::nullopt;
  if (pos >= text.size() || text[pos] != sep) return std::nullopt;
  ++pos;
  if (!read_uint(text, pos, 2, out.date.day)) return std::nullopt;
  out.date.year = static_cast<int>(year);
  if (!valid_date(out.date)) return std::nullopt;
  if (pos == text.size()) return out;
  if (text[pos] != ' ' && text[pos] != 'T') return std::nullopt;
  ++pos;
  if (!read_uint(text, pos, 2, out.hour)) return std::nullopt;
  if (pos >= text.size() || text[pos] != ':') return std::nullopt;
  ++pos;
  if (!read_uint(text, pos, 2, out.minute)) return std::nullopt;
  if (pos < text.size() && text[pos] == ':') {
    ++pos;
    if (!read_uint(text, pos, 2, out.second)) return std::nullopt;
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) return std::nullopt;
  if (out.hour > 23 || out.minute > 59 || out.second > 60) return std::nullopt;
  return out;
}

}  // namespace

std::optional<CivilDate> parse_date(std::string_view text) {
  auto parsed = parse_datetime(text);
  if (!parsed) return std::nullopt;
  return parsed->date;
}

std::optional<std::int64_t> parse_unix_seconds(std::string_view text) {
  std::int64_t direct = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), direct);
  if (ec == std::errc{} && ptr == text.data() + text.size() && !text.empty()) return direct;
  auto parsed = parse_datetime(text);
  if (!parsed) return std::nullopt;
  return days_from_civil(parsed->date) * 86400 + parsed->hour * 3600 + parsed->minute * 60 +
         parsed->second;
}

std::string format_date(const CivilDate& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", date.year, date.month, date.day);
  return buf;
}

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace ctiv::util
