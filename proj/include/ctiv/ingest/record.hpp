#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace ctiv::ingest {

// Attribute slots of a normalized threat record. The first fourteen are the
// MISP-derived attributes; asn/owner/country come from enrichment and
// attack is the website-feed label.
enum class Field : std::uint8_t {
  event,
  threat_level,
  threat_type,
  name,
  date,
  timestamp,
  ip_dst,
  ip_src,
  port,
  domain,
  file_hash,
  filename,
  description,
  comment,
  asn,
  owner,
  country,
  attack,
};

inline constexpr std::size_t kFieldCount = 18;

std::span<const Field> all_fields();
std::string_view field_name(Field field);

// Resolves canonical names ("ip_src") and the human spellings used in
// requirement documents ("IP source", "File hash", "IP"). Throws
// UnknownAttributeError for anything else.
Field parse_field(std::string_view name);
std::optional<Field> try_parse_field(std::string_view name);

// One normalized threat event. Values are stored in canonical text form:
// threat_level "1".."3", port "0".."65535", timestamp as decimal Unix
// seconds, date as "YYYY-MM-DD", asn as a decimal number.
class CtiRecord {
 public:
  CtiRecord() = default;
  explicit CtiRecord(std::string dataset_id) : dataset_id_(std::move(dataset_id)) {}

  const std::string& dataset_id() const { return dataset_id_; }
  void set_dataset_id(std::string id) { dataset_id_ = std::move(id); }

  const std::optional<std::string>& get(Field field) const {
    return values_[static_cast<std::size_t>(field)];
  }
  bool has(Field field) const { return get(field).has_value(); }

  // Canonicalizes and stores a value. Blank input clears the slot. Throws
  // ContractError when the value violates the slot's domain.
  void set(Field field, std::string_view raw);
  // Same as set() but reports failure instead of throwing.
  bool try_set(Field field, std::string_view raw);
  void clear(Field field) { values_[static_cast<std::size_t>(field)].reset(); }

  std::optional<int> threat_level() const;
  std::optional<int> port() const;
  std::optional<std::int64_t> timestamp() const;
  std::optional<std::int64_t> asn() const;

  // True when no attribute slot is populated.
  bool empty() const;

  // Unambiguous length-prefixed serialization, used for hashing and
  // byte-equality deduplication.
  std::string canonical() const;

  friend bool operator==(const CtiRecord&, const CtiRecord&) = default;
  friend auto operator<=>(const CtiRecord&, const CtiRecord&) = default;

 private:
  std::string dataset_id_;
  std::array<std::optional<std::string>, kFieldCount> values_{};
};

}  // namespace ctiv::ingest
