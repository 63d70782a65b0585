#include "ctiv/ingest/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <unordered_map>

#include "ctiv/errors.hpp"
#include "ctiv/ingest/csv_feed.hpp"
#include "ctiv/util/hash.hpp"
#include "ctiv/util/strings.hpp"

namespace ctiv::ingest {

using nlohmann::json;

namespace {

constexpr int kDatasetFormatVersion = 1;
constexpr Field kLabelSlots[] = {Field::attack, Field::threat_type, Field::name};

void sort_unique(std::vector<CtiRecord>& records) {
  std::sort(records.begin(), records.end());
  records.erase(std::unique(records.begin(), records.end()), records.end());
}

// Replaces labels seen exactly once. Returns whether anything changed.
bool group_rare_labels(std::vector<CtiRecord>& records, const std::string& rare) {
  bool changed = false;
  for (Field slot : kLabelSlots) {
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& r : records)
      if (const auto& v = r.get(slot)) ++counts[*v];
    for (auto& r : records) {
      const auto& v = r.get(slot);
      if (v && *v != rare && counts[*v] == 1) {
        r.set(slot, rare);
        changed = true;
      }
    }
  }
  return changed;
}

}  // namespace

Dataset::Dataset(std::string dataset_id, std::vector<CtiRecord> records)
    : id_(std::move(dataset_id)), records_(std::move(records)) {
  sort_unique(records_);
  std::string blob;
  for (const auto& r : records_) {
    blob += r.canonical();
    blob += '\n';
  }
  fingerprint_ = util::sha256_hex(blob);
}

std::map<std::string, std::string, std::less<>> NormalizeOptions::default_label_aliases() {
  return {
      {"ransom", "ransomware"},   {"trojans", "trojan"},     {"phish", "phishing"},
      {"botnets", "botnet"},      {"exploits", "exploit"},   {"bots", "botnet"},
      {"bot", "botnet"},          {"malwares", "malware"},   {"spam", "malspam"},
  };
}

std::int64_t round_to_hour(std::int64_t seconds) {
  const std::int64_t shifted = seconds + 1800;
  std::int64_t hours = shifted / 3600;
  if (shifted % 3600 != 0 && shifted < 0) --hours;  // floor for negatives
  return hours * 3600;
}

std::string base_word(std::string_view label, const NormalizeOptions& options) {
  const auto lowered = util::to_lower(util::trim(label));
  std::string word;
  for (char c : lowered) {
    const bool separator = std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '/' ||
                           c == ';' || c == '.' || c == '|' || c == '(' || c == ')';
    if (separator) {
      if (!word.empty()) break;
      continue;
    }
    word.push_back(c);
  }
  if (auto it = options.label_aliases.find(word); it != options.label_aliases.end()) return it->second;
  return word;
}

Dataset normalize(std::vector<CtiRecord> records, std::string_view dataset_id,
                  const NormalizeOptions& options) {
  std::vector<CtiRecord> cleaned;
  cleaned.reserve(records.size());
  for (auto& r : records) {
    r.set_dataset_id(std::string(dataset_id));
    if (auto ts = r.timestamp()) r.set(Field::timestamp, std::to_string(round_to_hour(*ts)));
    if (const auto& v = r.get(Field::attack)) r.set(Field::attack, base_word(*v, options));
    for (Field slot : {Field::threat_type, Field::name}) {
      if (const auto& v = r.get(slot)) r.set(slot, util::to_lower(util::trim(*v)));
    }
    if (r.empty()) continue;
    cleaned.push_back(std::move(r));
  }
  sort_unique(cleaned);
  while (group_rare_labels(cleaned, options.rare_label)) sort_unique(cleaned);
  return Dataset(std::string(dataset_id), std::move(cleaned));
}

Selection select_columns(const Dataset& dataset, std::span<const Field> observed, Field label) {
  if (observed.empty()) throw ContractError("at least one observed attribute is required");
  std::vector<Field> columns(observed.begin(), observed.end());
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  if (std::find(columns.begin(), columns.end(), label) != columns.end())
    throw ContractError("label attribute " + std::string(field_name(label)) + " is also observed");

  Selection out;
  out.table.columns = columns;
  out.table.label = label;
  for (const auto& r : dataset.records()) {
    const auto& y = r.get(label);
    const bool complete = y && std::all_of(columns.begin(), columns.end(),
                                           [&](Field f) { return r.has(f); });
    if (!complete) {
      ++out.dropped;
      continue;
    }
    std::vector<std::string> row;
    row.reserve(columns.size());
    for (Field f : columns) row.push_back(*r.get(f));
    out.table.rows.push_back(std::move(row));
    out.table.labels.push_back(*y);
  }
  return out;
}

Selection select_columns(const Dataset& dataset, const std::vector<std::string>& observed,
                         std::string_view label) {
  std::vector<Field> fields;
  for (const auto& name : observed) fields.push_back(parse_field(name));
  return select_columns(dataset, fields, parse_field(label));
}

Table project(std::span<const CtiRecord> records, std::span<const Field> columns) {
  Table t;
  t.columns.assign(columns.begin(), columns.end());
  for (const auto& r : records) {
    std::vector<std::string> row;
    row.reserve(columns.size());
    for (Field f : columns) row.push_back(r.get(f).value_or(""));
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

json record_to_json(const CtiRecord& r) {
  json obj = json::object();
  for (Field f : all_fields()) {
    if (const auto& v = r.get(f)) obj[std::string(field_name(f))] = *v;
  }
  return obj;
}

CtiRecord record_from_json(const json& obj, std::string_view dataset_id) {
  if (!obj.is_object()) throw FormatError("record must be a JSON object");
  CtiRecord r{std::string(dataset_id)};
  for (const auto& [key, value] : obj.items()) {
    const Field f = parse_field(key);
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number_integer()) {
      text = std::to_string(value.get<long long>());
    } else if (value.is_null()) {
      continue;
    } else {
      throw FormatError("attribute '" + key + "' must be a string or integer");
    }
    r.set(f, text);
  }
  return r;
}

}  // namespace

std::string dataset_to_json(const Dataset& dataset) {
  json doc;
  doc["format"] = "ctiv-dataset";
  doc["version"] = kDatasetFormatVersion;
  doc["dataset_id"] = dataset.id();
  doc["fingerprint"] = dataset.fingerprint();
  json records = json::array();
  for (const auto& r : dataset.records()) records.push_back(record_to_json(r));
  doc["records"] = std::move(records);
  return doc.dump(1) + "\n";
}

Dataset dataset_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("dataset is not JSON: ") + e.what());
  }
  if (doc.value("format", "") != "ctiv-dataset") throw FormatError("not a dataset document");
  if (doc.value("version", 0) != kDatasetFormatVersion)
    throw FormatError("unsupported dataset format version");
  const std::string id = doc.value("dataset_id", "");
  std::vector<CtiRecord> records;
  for (const auto& obj : doc.at("records")) records.push_back(record_from_json(obj, id));
  Dataset dataset(id, std::move(records));
  if (doc.contains("fingerprint") && doc["fingerprint"].get<std::string>() != dataset.fingerprint())
    throw FormatError("dataset fingerprint does not match its records");
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write " + path.string());
  out << dataset_to_json(dataset);
  if (!out) throw StorageError("failed writing " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) { return dataset_from_json(read_file(path)); }

std::vector<CtiRecord> records_from_json(std::string_view text, std::string_view dataset_id) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("records are not JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("records")) doc = doc["records"];
  if (!doc.is_array()) throw FormatError("expected an array of records");
  std::vector<CtiRecord> out;
  for (const auto& obj : doc) out.push_back(record_from_json(obj, dataset_id));
  return out;
}

std::vector<CtiRecord> records_from_csv(std::string_view text, std::string_view dataset_id) {
  const auto rows = read_csv(text);
  if (rows.empty()) throw FormatError("record CSV has no header");
  std::vector<Field> header;
  for (const auto& cell : rows.front().cells) header.push_back(parse_field(cell));
  std::vector<CtiRecord> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& cells = rows[i].cells;
    if (cells.size() != header.size())
      throw FormatError("record CSV line " + std::to_string(rows[i].line) + " has " +
                        std::to_string(cells.size()) + " cells, header has " +
                        std::to_string(header.size()));
    CtiRecord r{std::string(dataset_id)};
    for (std::size_t c = 0; c < header.size(); ++c) {
      const auto v = util::trim(cells[c]);
      if (v == "-") continue;
      r.set(header[c], v);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ctiv::ingest
