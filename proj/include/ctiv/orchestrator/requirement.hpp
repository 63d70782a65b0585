#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctiv/ingest/record.hpp"

namespace ctiv::orchestrator {

// What a SOC wants validated: predict `unknown` from `observed`, and only
// trust a model whose F1 reaches `confidence`.
struct Requirement {
  std::vector<ingest::Field> observed;  // schema order, no duplicates
  ingest::Field unknown = ingest::Field::attack;
  double confidence = 0.0;
  std::optional<std::string> dataset_id;
};

// Validates and canonicalizes. Throws ContractError when observed is empty,
// contains `unknown`, or confidence lies outside [0, 1].
Requirement make_requirement(std::vector<ingest::Field> observed, ingest::Field unknown, double confidence,
                             std::optional<std::string> dataset_id = std::nullopt);

// The eighteen named observed-attribute sets, "ob1" .. "ob18".
std::optional<std::vector<ingest::Field>> observed_set_alias(std::string_view name);

// Either "ob1".."ob18" or a comma separated attribute list.
std::vector<ingest::Field> parse_observed(std::string_view text);

// Accepts `key: value` lines (# comments allowed) or a JSON object with
// keys ob, un, confidence and optional dataset. ob may be an alias, a comma
// list, or (JSON) an array. `confidence_override` wins over the document
// and makes the confidence key optional; `confidence_fallback` applies only
// when neither gives one.
Requirement interpret(std::string_view document, std::optional<double> confidence_override = std::nullopt,
                      std::optional<double> confidence_fallback = std::nullopt);

// "ob=<sorted names>;un=<name>;fp=<dataset fingerprint>". Independent of
// the order observed attributes were given in.
std::string requirement_key(const Requirement& requirement, std::string_view dataset_fingerprint);

}  // namespace ctiv::orchestrator
