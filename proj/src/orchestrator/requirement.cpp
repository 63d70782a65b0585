#include "ctiv/orchestrator/requirement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "ctiv/errors.hpp"
#include "ctiv/util/strings.hpp"

namespace ctiv::orchestrator {

using ingest::Field;
using nlohmann::json;

namespace {

// Named observed-attribute sets; "IP" means the source address.
const std::array<std::vector<Field>, 18>& named_sets() {
  using F = Field;
  static const std::array<std::vector<Field>, 18> sets = {{
      {F::date},
      {F::domain},
      {F::ip_src, F::asn, F::owner, F::country},
      {F::date, F::domain},
      {F::ip_src, F::asn, F::owner, F::country, F::domain},
      {F::ip_src, F::asn, F::owner, F::country, F::date},
      {F::ip_src, F::asn, F::owner, F::country, F::domain, F::date},
      {F::ip_dst, F::port, F::ip_src, F::asn, F::owner, F::country, F::domain, F::file_hash, F::filename},
      {F::ip_dst, F::port, F::ip_src, F::asn, F::owner, F::country, F::domain, F::description, F::comment,
       F::file_hash, F::filename},
      {F::ip_dst, F::port, F::ip_src, F::asn, F::owner, F::country, F::domain, F::description, F::comment},
      {F::ip_dst, F::port, F::ip_src, F::asn, F::owner, F::country, F::domain, F::date, F::timestamp,
       F::file_hash, F::filename},
      {F::ip_dst, F::port, F::ip_src, F::asn, F::owner, F::country, F::domain, F::date, F::timestamp,
       F::description, F::comment, F::file_hash, F::filename},
      {F::ip_dst, F::port, F::ip_src, F::asn, F::owner, F::country, F::domain, F::date, F::timestamp,
       F::description, F::comment},
      {F::ip_dst, F::port, F::ip_src, F::asn, F::owner, F::country, F::domain, F::date, F::timestamp},
      {F::description, F::comment, F::file_hash, F::filename},
      {F::date, F::timestamp, F::file_hash, F::filename},
      {F::date, F::timestamp, F::description, F::comment, F::file_hash, F::filename},
      {F::date, F::timestamp, F::description, F::comment},
  }};
  return sets;
}

double parse_confidence(std::string_view text) {
  const std::string s(util::trim(text));
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ContractError("confidence '" + s + "' is not a number");
  return v;
}

std::vector<Field> parse_observed_json(const json& value) {
  if (value.is_string()) return parse_observed(value.get<std::string>());
  if (!value.is_array()) throw ContractError("ob must be a string or an array of attribute names");
  std::vector<Field> out;
  for (const auto& item : value) {
    if (!item.is_string()) throw ContractError("ob entries must be strings");
    const auto name = item.get<std::string>();
    if (auto alias = observed_set_alias(name)) {
      out.insert(out.end(), alias->begin(), alias->end());
    } else {
      out.push_back(ingest::parse_field(name));
    }
  }
  return out;
}

bool is_key(std::string_view key, std::initializer_list<std::string_view> names) {
  return std::any_of(names.begin(), names.end(), [&](std::string_view n) { return util::iequals(key, n); });
}

}  // namespace

Requirement make_requirement(std::vector<Field> observed, Field unknown, double confidence,
                             std::optional<std::string> dataset_id) {
  if (observed.empty()) throw ContractError("a requirement needs at least one observed attribute");
  if (!std::isfinite(confidence) || confidence < 0.0 || confidence > 1.0)
    throw ContractError("confidence must lie in [0, 1]");
  std::sort(observed.begin(), observed.end());
  observed.erase(std::unique(observed.begin(), observed.end()), observed.end());
  if (std::find(observed.begin(), observed.end(), unknown) != observed.end())
    throw ContractError("the unknown attribute '" + std::string(ingest::field_name(unknown)) +
                        "' is also observed");
  return Requirement{std::move(observed), unknown, confidence, std::move(dataset_id)};
}

std::optional<std::vector<Field>> observed_set_alias(std::string_view name) {
  const auto s = util::to_lower(util::trim(name));
  if (s.size() < 3 || s.compare(0, 2, "ob") != 0) return std::nullopt;
  const auto digits = std::string_view(s).substr(2);
  if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) || digits.size() > 2)
    return std::nullopt;
  const int n = std::stoi(std::string(digits));
  if (n < 1 || n > 18) return std::nullopt;
  return named_sets()[static_cast<std::size_t>(n - 1)];
}

std::vector<Field> parse_observed(std::string_view text) {
  if (auto alias = observed_set_alias(text)) return *alias;
  std::vector<Field> out;
  for (const auto& part : util::split(text, ',')) {
    const auto name = util::trim(part);
    if (name.empty()) continue;
    if (auto alias = observed_set_alias(name)) {
      out.insert(out.end(), alias->begin(), alias->end());
    } else {
      out.push_back(ingest::parse_field(name));
    }
  }
  return out;
}

Requirement interpret(std::string_view document, std::optional<double> confidence_override,
                      std::optional<double> confidence_fallback) {
  std::optional<std::vector<Field>> observed;
  std::optional<Field> unknown;
  std::optional<double> confidence;
  std::optional<std::string> dataset;

  const auto body = util::trim(document);
  if (!body.empty() && body.front() == '{') {
    json doc;
    try {
      doc = json::parse(body);
    } catch (const json::parse_error& e) {
      throw ContractError(std::string("requirement document is not valid JSON: ") + e.what());
    }
    for (const auto& [key, value] : doc.items()) {
      if (is_key(key, {"ob", "ob_attrib", "observed"})) {
        observed = parse_observed_json(value);
      } else if (is_key(key, {"un", "un_attrib", "unknown"})) {
        if (!value.is_string()) throw ContractError("un must be an attribute name");
        unknown = ingest::parse_field(value.get<std::string>());
      } else if (is_key(key, {"confidence"})) {
        if (value.is_number()) {
          confidence = value.get<double>();
        } else if (value.is_string()) {
          confidence = parse_confidence(value.get<std::string>());
        } else {
          throw ContractError("confidence must be a number");
        }
      } else if (is_key(key, {"dataset", "dataset_id"})) {
        if (!value.is_string()) throw ContractError("dataset must be a string");
        dataset = value.get<std::string>();
      } else {
        throw ContractError("unknown requirement key '" + key + "'");
      }
    }
  } else {
    std::size_t line_no = 0;
    for (const auto& raw : util::split(document, '\n')) {
      ++line_no;
      const auto line = util::trim(raw);
      if (line.empty() || line.front() == '#') continue;
      const auto colon = line.find_first_of(":=");
      if (colon == std::string_view::npos)
        throw ContractError("requirement line " + std::to_string(line_no) + " is not 'key: value'");
      const auto key = util::trim(line.substr(0, colon));
      const auto value = util::trim(line.substr(colon + 1));
      if (is_key(key, {"ob", "ob_attrib", "observed"})) {
        observed = parse_observed(value);
      } else if (is_key(key, {"un", "un_attrib", "unknown"})) {
        unknown = ingest::parse_field(value);
      } else if (is_key(key, {"confidence"})) {
        confidence = parse_confidence(value);
      } else if (is_key(key, {"dataset", "dataset_id"})) {
        dataset = std::string(value);
      } else {
        throw ContractError("unknown requirement key '" + std::string(key) + "'");
      }
    }
  }
  if (!observed) throw ContractError("requirement does not name observed attributes (ob)");
  if (!unknown) throw ContractError("requirement does not name the unknown attribute (un)");
  if (confidence_override) confidence = confidence_override;
  if (!confidence) confidence = confidence_fallback;
  if (!confidence) throw ContractError("requirement does not give a confidence");
  return make_requirement(std::move(*observed), *unknown, *confidence, std::move(dataset));
}

std::string requirement_key(const Requirement& requirement, std::string_view dataset_fingerprint) {
  std::vector<std::string> names;
  for (Field f : requirement.observed) names.emplace_back(ingest::field_name(f));
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::string key = "ob=";
  for (std::size_t i = 0; i < names.size(); ++i) key += (i ? "," : "") + names[i];
  key += ";un=";
  key += ingest::field_name(requirement.unknown);
  key += ";fp=";
  key += dataset_fingerprint;
  return key;
}

}  // namespace ctiv::orchestrator
