#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "ctiv/diagnostics.hpp"
#include "ctiv/ingest/record.hpp"

namespace ctiv::ingest {

// WhoIS-style answer for an IP or domain. Absent members are lookup misses.
struct EnrichmentResult {
  std::optional<std::int64_t> asn;
  std::optional<std::string> owner;
  std::optional<std::string> country;  // ISO-3166 alpha-2

  friend bool operator==(const EnrichmentResult&, const EnrichmentResult&) = default;
};

// Providers signal failure by throwing; enrich() turns failures into
// reports and never propagates them.
class EnrichmentProvider {
 public:
  virtual ~EnrichmentProvider() = default;
  virtual std::optional<EnrichmentResult> lookup(std::string_view ip_or_domain) = 0;
  virtual std::optional<std::string> resolve(std::string_view /*host*/) { return std::nullopt; }
};

// In-memory table loaded from CSV rows of (ip-or-domain, asn, owner,
// country); a header row is detected and skipped. Host -> IP resolutions
// can be added separately.
class OfflineEnrichmentTable final : public EnrichmentProvider {
 public:
  OfflineEnrichmentTable() = default;
  static OfflineEnrichmentTable from_csv(std::string_view csv);

  void add(std::string key, EnrichmentResult result);
  void add_resolution(std::string host, std::string ip);
  // Loads (host, ip) rows, header detected the same way.
  void load_resolutions_csv(std::string_view csv);

  std::optional<EnrichmentResult> lookup(std::string_view ip_or_domain) override;
  std::optional<std::string> resolve(std::string_view host) override;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, EnrichmentResult, std::less<>> entries_;
  std::map<std::string, std::string, std::less<>> resolutions_;
};

// Host part of a domain/URL value: scheme, path and port removed.
std::string host_of(std::string_view domain_or_url);

// Attaches ASN/owner/country. Records with a domain but no ip_src first get
// the domain resolved. At most one report is emitted per call; on provider
// failure the input record is returned unchanged.
CtiRecord enrich(const CtiRecord& record, EnrichmentProvider& provider, Diagnostics& diagnostics,
                 std::size_t index = 0);

}  // namespace ctiv::ingest
