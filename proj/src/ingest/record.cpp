#include "ctiv/ingest/record.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>

#include "ctiv/errors.hpp"
#include "ctiv/util/civil_time.hpp"
#include "ctiv/util/strings.hpp"

namespace ctiv::ingest {

namespace {

constexpr std::array<Field, kFieldCount> kAllFields = {
    Field::event,    Field::threat_level, Field::threat_type, Field::name,        Field::date,
    Field::timestamp, Field::ip_dst,      Field::ip_src,      Field::port,        Field::domain,
    Field::file_hash, Field::filename,    Field::description, Field::comment,     Field::asn,
    Field::owner,    Field::country,      Field::attack,
};

constexpr std::array<std::string_view, kFieldCount> kNames = {
    "event",     "threat_level", "threat_type", "name",    "date",  "timestamp",
    "ip_dst",    "ip_src",       "port",        "domain",  "file_hash", "filename",
    "description", "comment",    "asn",         "owner",   "country", "attack",
};

std::string squash(std::string_view name) {
  std::string out;
  for (char c : util::trim(name)) {
    if (c == ' ' || c == '-' || c == '_') {
      if (!out.empty() && out.back() != '_') out.push_back('_');
    } else {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

const std::unordered_map<std::string, Field>& aliases() {
  static const std::unordered_map<std::string, Field> table = [] {
    std::unordered_map<std::string, Field> t;
    for (std::size_t i = 0; i < kFieldCount; ++i) t.emplace(std::string(kNames[i]), kAllFields[i]);
    t.emplace("ip", Field::ip_src);
    t.emplace("ip_source", Field::ip_src);
    t.emplace("source_ip", Field::ip_src);
    t.emplace("ipsrc", Field::ip_src);
    t.emplace("ip_destination", Field::ip_dst);
    t.emplace("destination_ip", Field::ip_dst);
    t.emplace("ipdst", Field::ip_dst);
    t.emplace("hash", Field::file_hash);
    t.emplace("filehash", Field::file_hash);
    t.emplace("file_name", Field::filename);
    t.emplace("threatlevel", Field::threat_level);
    t.emplace("threattype", Field::threat_type);
    t.emplace("ip_owner", Field::owner);
    t.emplace("title", Field::event);
    t.emplace("info", Field::event);
    return t;
  }();
  return table;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view text) {
  Int value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

bool valid_ip(const std::string& text) {
  unsigned char buf[16];
  return inet_pton(AF_INET, text.c_str(), buf) == 1 || inet_pton(AF_INET6, text.c_str(), buf) == 1;
}

std::optional<std::string> canonicalize(Field field, std::string_view raw) {
  switch (field) {
    case Field::threat_level: {
      auto v = parse_int<int>(raw);
      if (!v || *v < 1 || *v > 3) return std::nullopt;
      return std::to_string(*v);
    }
    case Field::port: {
      auto v = parse_int<long>(raw);
      if (!v || *v < 0 || *v > 65535) return std::nullopt;
      return std::to_string(*v);
    }
    case Field::timestamp: {
      auto v = util::parse_unix_seconds(raw);
      if (!v) return std::nullopt;
      return std::to_string(*v);
    }
    case Field::date: {
      auto d = util::parse_date(raw);
      if (!d) return std::nullopt;
      return util::format_date(*d);
    }
    case Field::asn: {
      std::string_view digits = raw;
      if (digits.size() > 2 && (digits[0] == 'A' || digits[0] == 'a') &&
          (digits[1] == 'S' || digits[1] == 's'))
        digits.remove_prefix(2);
      auto v = parse_int<std::int64_t>(digits);
      if (!v || *v < 0) return std::nullopt;
      return std::to_string(*v);
    }
    case Field::ip_dst:
    case Field::ip_src: {
      std::string ip(raw);
      if (!valid_ip(ip)) return std::nullopt;
      return ip;
    }
    default:
      return std::string(raw);
  }
}

}  // namespace

std::span<const Field> all_fields() { return kAllFields; }

std::string_view field_name(Field field) { return kNames[static_cast<std::size_t>(field)]; }

std::optional<Field> try_parse_field(std::string_view name) {
  const auto& table = aliases();
  auto it = table.find(squash(name));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

Field parse_field(std::string_view name) {
  if (auto f = try_parse_field(name)) return *f;
  throw UnknownAttributeError("unknown attribute '" + std::string(name) + "'");
}

bool CtiRecord::try_set(Field field, std::string_view raw) {
  const auto trimmed = util::trim(raw);
  auto& slot = values_[static_cast<std::size_t>(field)];
  if (trimmed.empty()) {
    slot.reset();
    return true;
  }
  auto value = canonicalize(field, trimmed);
  if (!value) return false;
  slot = std::move(value);
  return true;
}

void CtiRecord::set(Field field, std::string_view raw) {
  if (!try_set(field, raw)) {
    throw ContractError("invalid value '" + std::string(raw) + "' for attribute " +
                        std::string(field_name(field)));
  }
}

std::optional<int> CtiRecord::threat_level() const {
  const auto& v = get(Field::threat_level);
  return v ? parse_int<int>(*v) : std::nullopt;
}

std::optional<int> CtiRecord::port() const {
  const auto& v = get(Field::port);
  return v ? parse_int<int>(*v) : std::nullopt;
}

std::optional<std::int64_t> CtiRecord::timestamp() const {
  const auto& v = get(Field::timestamp);
  return v ? parse_int<std::int64_t>(*v) : std::nullopt;
}

std::optional<std::int64_t> CtiRecord::asn() const {
  const auto& v = get(Field::asn);
  return v ? parse_int<std::int64_t>(*v) : std::nullopt;
}

bool CtiRecord::empty() const {
  return std::none_of(values_.begin(), values_.end(), [](const auto& v) { return v.has_value(); });
}

std::string CtiRecord::canonical() const {
  std::string out = std::to_string(dataset_id_.size()) + ':' + dataset_id_;
  for (const auto& v : values_) {
    if (!v) {
      out += '-';
    } else {
      out += std::to_string(v->size());
      out += ':';
      out += *v;
    }
  }
  return out;
}

}  // namespace ctiv::ingest
