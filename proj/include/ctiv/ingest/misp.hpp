#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctiv/diagnostics.hpp"
#include "ctiv/ingest/record.hpp"

namespace ctiv::ingest {

// Result of splitting a MISP tag such as misp-galaxy:tool="KHRAT".
struct GalaxyTag {
  std::string type;  // "tool", "threat-actor", "malware", ...
  std::string name;  // "KHRAT"
};

std::optional<GalaxyTag> parse_galaxy_tag(std::string_view tag);

// Value of a classification-style tag ("classification:phishing",
// ecsirt:malicious-code="ransomware"), used when no galaxy tag exists.
std::optional<std::string> parse_classification_tag(std::string_view tag);

// Fields an attribute of the given MISP type routes to, in value order for
// composite "a|b" types. Empty when the type is not extracted.
std::vector<Field> route_attribute_type(std::string_view misp_type);

// Parses MISP-style events: a JSON array, a {"response": [...]} envelope,
// a single event, or newline-delimited events; each may be wrapped in
// {"Event": {...}}. Emits one record per extracted attribute (event-level
// fields copied onto each), or a single event-level record for events
// without attributes. Unsupported attribute types, invalid values and
// events without "info" are reported, one report per lost row.
// Throws FormatError when the input is not JSON.
std::vector<CtiRecord> parse_misp_events(std::string_view input, std::string_view dataset_id,
                                         Diagnostics& diagnostics,
                                         std::string_view source_id = "misp");

}  // namespace ctiv::ingest
