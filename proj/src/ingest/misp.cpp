#include "ctiv/ingest/misp.hpp"

#include <nlohmann/json.hpp>

#include "ctiv/errors.hpp"
#include "ctiv/util/strings.hpp"

namespace ctiv::ingest {

using nlohmann::json;

namespace {

std::string strip_quotes(std::string_view text) {
  text = util::trim(text);
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') text = text.substr(1, text.size() - 2);
  return std::string(text);
}

// Scalar JSON value as text; numbers are printed without decoration.
std::optional<std::string> as_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  if (value.is_number_unsigned()) return std::to_string(value.get<unsigned long long>());
  if (value.is_number_float()) return std::to_string(static_cast<long long>(value.get<double>()));
  return std::nullopt;
}

const json* member(const json& obj, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) return nullptr;
  for (const char* key : keys) {
    auto it = obj.find(key);
    if (it != obj.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

std::vector<json> parse_documents(std::string_view input) {
  std::vector<json> docs;
  try {
    docs.push_back(json::parse(input));
    return docs;
  } catch (const json::parse_error&) {
  }
  // Fall back to one JSON value per line.
  std::size_t start = 0;
  while (start < input.size()) {
    auto end = input.find('\n', start);
    if (end == std::string_view::npos) end = input.size();
    const auto line = util::trim(input.substr(start, end - start));
    if (!line.empty()) {
      try {
        docs.push_back(json::parse(line));
      } catch (const json::parse_error& e) {
        throw FormatError(std::string("MISP input is not JSON: ") + e.what());
      }
    }
    start = end + 1;
  }
  if (docs.empty()) throw FormatError("MISP input is empty");
  return docs;
}

void collect_events(const json& doc, std::vector<const json*>& events) {
  if (doc.is_array()) {
    for (const auto& item : doc) collect_events(item, events);
    return;
  }
  if (!doc.is_object()) return;
  if (const json* response = member(doc, {"response"})) {
    collect_events(*response, events);
    return;
  }
  if (const json* inner = member(doc, {"Event"})) {
    events.push_back(inner);
    return;
  }
  events.push_back(&doc);
}

void collect_attributes(const json& event, std::vector<const json*>& out) {
  if (const json* attrs = member(event, {"Attribute", "attributes", "Attributes"})) {
    if (attrs->is_array())
      for (const auto& a : *attrs) out.push_back(&a);
  }
  if (const json* objects = member(event, {"Object", "objects"})) {
    if (objects->is_array())
      for (const auto& o : *objects) collect_attributes(o, out);
  }
}

std::vector<std::string> tag_names(const json& event) {
  std::vector<std::string> names;
  const json* tags = member(event, {"Tag", "tags", "Tags"});
  if (!tags || !tags->is_array()) return names;
  for (const auto& t : *tags) {
    if (t.is_string()) {
      names.push_back(t.get<std::string>());
    } else if (const json* name = member(t, {"name"}); name && name->is_string()) {
      names.push_back(name->get<std::string>());
    }
  }
  return names;
}

std::size_t row_count(const json& event) {
  std::vector<const json*> attrs;
  collect_attributes(event, attrs);
  return attrs.empty() ? 1 : attrs.size();
}

}  // namespace

std::optional<GalaxyTag> parse_galaxy_tag(std::string_view tag) {
  tag = util::trim(tag);
  constexpr std::string_view kPrefix = "misp-galaxy:";
  if (tag.substr(0, kPrefix.size()) != kPrefix) return std::nullopt;
  tag.remove_prefix(kPrefix.size());
  const auto eq = tag.find('=');
  if (eq == std::string_view::npos || eq == 0) return std::nullopt;
  GalaxyTag out{std::string(util::trim(tag.substr(0, eq))), strip_quotes(tag.substr(eq + 1))};
  if (out.name.empty()) return std::nullopt;
  return out;
}

std::optional<std::string> parse_classification_tag(std::string_view tag) {
  tag = util::trim(tag);
  const auto colon = tag.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto ns = util::to_lower(tag.substr(0, colon));
  if (ns != "classification" && ns != "ecsirt" && ns != "rsit") return std::nullopt;
  auto rest = tag.substr(colon + 1);
  const auto eq = rest.find('=');
  std::string value = eq == std::string_view::npos ? strip_quotes(rest) : strip_quotes(rest.substr(eq + 1));
  if (value.empty()) return std::nullopt;
  return value;
}

std::vector<Field> route_attribute_type(std::string_view misp_type) {
  const auto type = util::to_lower(util::trim(misp_type));
  if (type == "ip-dst") return {Field::ip_dst};
  if (type == "ip-port" || type == "ip-dst|port") return {Field::ip_dst, Field::port};
  if (type == "ip-src") return {Field::ip_src};
  if (type == "ip-src|port") return {Field::ip_src, Field::port};
  if (type == "domain" || type == "hostname" || type == "url") return {Field::domain};
  if (type == "domain|ip") return {Field::domain, Field::ip_src};
  if (type == "hostname|port") return {Field::domain, Field::port};
  if (type == "md5" || type == "sha1" || type == "sha256") return {Field::file_hash};
  if (type == "filename|md5" || type == "filename|sha1" || type == "filename|sha256")
    return {Field::filename, Field::file_hash};
  if (type == "filename") return {Field::filename};
  if (type == "comment" || type == "text") return {Field::description};
  return {};
}

std::vector<CtiRecord> parse_misp_events(std::string_view input, std::string_view dataset_id,
                                         Diagnostics& diagnostics, std::string_view source_id) {
  const auto docs = parse_documents(input);
  std::vector<const json*> events;
  for (const auto& doc : docs) collect_events(doc, events);

  const std::string source(source_id);
  std::vector<CtiRecord> out;
  for (std::size_t e = 0; e < events.size(); ++e) {
    const json& event = *events[e];
    const json* info = member(event, {"info"});
    if (!info || !info->is_string() || util::trim(info->get<std::string>()).empty()) {
      const auto lost = row_count(event);
      for (std::size_t i = 0; i < lost; ++i)
        diagnostics.add(source, e, "event without info skipped");
      continue;
    }

    CtiRecord base{std::string(dataset_id)};
    base.set(Field::event, info->get<std::string>());
    if (const json* level = member(event, {"threat_level_id", "threat_level"})) {
      // 4 (MISP) and 0 both mean undefined and stay absent.
      if (auto text = as_text(*level)) base.try_set(Field::threat_level, *text);
    }
    if (const json* date = member(event, {"date"})) {
      if (auto text = as_text(*date); text && !base.try_set(Field::date, *text))
        diagnostics.add(source, e, "ignored invalid event date '" + *text + "'");
    }

    std::optional<GalaxyTag> galaxy;
    std::optional<std::string> classification;
    for (const auto& tag : tag_names(event)) {
      if (!galaxy) galaxy = parse_galaxy_tag(tag);
      if (!classification) classification = parse_classification_tag(tag);
    }
    if (galaxy) {
      base.set(Field::threat_type, galaxy->type);
      base.set(Field::name, galaxy->name);
    } else if (classification) {
      base.set(Field::threat_type, *classification);
    }

    std::vector<const json*> attributes;
    collect_attributes(event, attributes);
    if (attributes.empty()) {
      out.push_back(std::move(base));
      continue;
    }

    for (const json* attr_ptr : attributes) {
      const json& attr = *attr_ptr;
      const json* type = member(attr, {"type"});
      const json* value = member(attr, {"value"});
      const auto type_text = type ? as_text(*type) : std::nullopt;
      const auto value_text = value ? as_text(*value) : std::nullopt;
      const auto route = type_text ? route_attribute_type(*type_text) : std::vector<Field>{};
      if (route.empty() || !value_text) {
        diagnostics.add(source, e,
                        "attribute type '" + type_text.value_or("?") + "' not extracted");
        continue;
      }

      CtiRecord rec = base;
      std::vector<std::string> parts =
          route.size() == 1 ? std::vector<std::string>{*value_text} : util::split(*value_text, '|');
      bool ok = parts.size() == route.size();
      for (std::size_t i = 0; ok && i < route.size(); ++i) ok = rec.try_set(route[i], parts[i]);
      if (!ok) {
        diagnostics.add(source, e, "invalid '" + *type_text + "' value '" + *value_text + "'");
        continue;
      }
      if (const json* ts = member(attr, {"timestamp"})) {
        if (auto text = as_text(*ts)) rec.try_set(Field::timestamp, *text);
      }
      if (const json* comment = member(attr, {"comment"}); comment && comment->is_string())
        rec.set(Field::comment, comment->get<std::string>());
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace ctiv::ingest
