#include "ctiv/ingest/enrich.hpp"

#include <charconv>

#include "ctiv/errors.hpp"
#include "ctiv/ingest/csv_feed.hpp"
#include "ctiv/util/strings.hpp"

namespace ctiv::ingest {

namespace {

std::optional<std::int64_t> parse_asn(std::string_view text) {
  text = util::trim(text);
  if (text.size() > 2 && (text[0] == 'A' || text[0] == 'a') && (text[1] == 'S' || text[1] == 's'))
    text.remove_prefix(2);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return v;
}

std::optional<std::string> non_empty(std::string_view text) {
  text = util::trim(text);
  if (text.empty() || text == "-") return std::nullopt;
  return std::string(text);
}

}  // namespace

OfflineEnrichmentTable OfflineEnrichmentTable::from_csv(std::string_view csv) {
  OfflineEnrichmentTable table;
  const auto rows = read_csv(csv);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& cells = rows[i].cells;
    if (cells.size() != 4)
      throw FormatError("enrichment table line " + std::to_string(rows[i].line) + " needs 4 cells");
    const auto asn_cell = non_empty(cells[1]);
    const auto asn = asn_cell ? parse_asn(*asn_cell) : std::nullopt;
    if (i == 0 && asn_cell && !asn) continue;  // header
    if (asn_cell && !asn)
      throw FormatError("enrichment table line " + std::to_string(rows[i].line) + " has a bad ASN");
    auto key = non_empty(cells[0]);
    if (!key) continue;
    table.add(util::to_lower(*key), {asn, non_empty(cells[2]), non_empty(cells[3])});
  }
  return table;
}

void OfflineEnrichmentTable::add(std::string key, EnrichmentResult result) {
  entries_.insert_or_assign(std::move(key), std::move(result));
}

void OfflineEnrichmentTable::add_resolution(std::string host, std::string ip) {
  resolutions_.insert_or_assign(std::move(host), std::move(ip));
}

void OfflineEnrichmentTable::load_resolutions_csv(std::string_view csv) {
  const auto rows = read_csv(csv);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& cells = rows[i].cells;
    if (cells.size() != 2)
      throw FormatError("resolution table line " + std::to_string(rows[i].line) + " needs 2 cells");
    auto host = non_empty(cells[0]);
    auto ip = non_empty(cells[1]);
    if (!host || !ip) continue;
    CtiRecord probe;
    if (!probe.try_set(Field::ip_src, *ip)) {
      if (i == 0) continue;  // header
      throw FormatError("resolution table line " + std::to_string(rows[i].line) + " has a bad IP");
    }
    add_resolution(util::to_lower(*host), *ip);
  }
}

std::optional<EnrichmentResult> OfflineEnrichmentTable::lookup(std::string_view ip_or_domain) {
  auto it = entries_.find(util::to_lower(ip_or_domain));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> OfflineEnrichmentTable::resolve(std::string_view host) {
  auto it = resolutions_.find(util::to_lower(host));
  if (it == resolutions_.end()) return std::nullopt;
  return it->second;
}

std::string host_of(std::string_view value) {
  value = util::trim(value);
  if (auto scheme = value.find("://"); scheme != std::string_view::npos) value.remove_prefix(scheme + 3);
  if (auto slash = value.find('/'); slash != std::string_view::npos) value = value.substr(0, slash);
  if (auto at = value.rfind('@'); at != std::string_view::npos) value.remove_prefix(at + 1);
  if (auto colon = value.find(':'); colon != std::string_view::npos && value.find(':', colon + 1) == std::string_view::npos)
    value = value.substr(0, colon);
  return util::to_lower(value);
}

CtiRecord enrich(const CtiRecord& record, EnrichmentProvider& provider, Diagnostics& diagnostics,
                 std::size_t index) {
  const auto& domain = record.get(Field::domain);
  if (!record.has(Field::ip_src) && !record.has(Field::ip_dst) && !domain) return record;

  CtiRecord out = record;
  try {
    if (domain && !out.has(Field::ip_src)) {
      if (auto ip = provider.resolve(host_of(*domain))) out.try_set(Field::ip_src, *ip);
    }
    std::string key;
    if (out.has(Field::ip_src)) {
      key = *out.get(Field::ip_src);
    } else if (out.has(Field::ip_dst)) {
      key = *out.get(Field::ip_dst);
    } else {
      key = host_of(*domain);
    }
    auto answer = provider.lookup(key);
    if (!answer && domain && key != host_of(*domain)) answer = provider.lookup(host_of(*domain));
    if (!answer) {
      diagnostics.add("enrich", index, "lookup miss for '" + key + "'");
      return out;
    }
    if (answer->asn) out.set(Field::asn, std::to_string(*answer->asn));
    if (answer->owner) out.set(Field::owner, *answer->owner);
    if (answer->country) out.set(Field::country, *answer->country);
    return out;
  } catch (const std::exception& e) {
    diagnostics.add("enrich", index, std::string("lookup failed: ") + e.what());
    return record;
  }
}

}  // namespace ctiv::ingest
