#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ctiv/ingest/record.hpp"

namespace ctiv::ingest {

// Immutable, deduplicated, canonically ordered record set. The fingerprint
// is a SHA-256 over the sorted canonical records, so it is insensitive to
// input order and changes whenever any record does.
class Dataset {
 public:
  Dataset() : Dataset("", {}) {}
  // Sorts and deduplicates `records`; records are taken as already
  // normalized.
  Dataset(std::string dataset_id, std::vector<CtiRecord> records);

  const std::string& id() const { return id_; }
  const std::vector<CtiRecord>& records() const { return records_; }
  const std::string& fingerprint() const { return fingerprint_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

 private:
  std::string id_;
  std::vector<CtiRecord> records_;
  std::string fingerprint_;
};

struct NormalizeOptions {
  // Base word -> canonical label. Targets must not themselves be keys.
  std::map<std::string, std::string, std::less<>> label_aliases = default_label_aliases();
  std::string rare_label = "other";

  static std::map<std::string, std::string, std::less<>> default_label_aliases();
};

// Rounds a Unix timestamp to the nearest hour, halves rounding up.
std::int64_t round_to_hour(std::int64_t seconds);

// Lowercased, trimmed first word of a descriptive label, then aliased.
// "phishing/ fraud" -> "phishing", "Ransom, Fake.PCN" -> "ransomware".
std::string base_word(std::string_view label, const NormalizeOptions& options);

// Rounds timestamps, cleans label slots (attack: base word; threat_type and
// name: lowercase), collapses labels seen exactly once into "other", and
// removes duplicates, repeating the last two steps to a fixed point so the
// operation is idempotent.
Dataset normalize(std::vector<CtiRecord> records, std::string_view dataset_id,
                  const NormalizeOptions& options = {});

// Observed columns plus an optional label column, one string per cell.
struct Table {
  std::vector<Field> columns;
  std::optional<Field> label;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> labels;  // parallel to rows when label is set

  std::size_t size() const { return rows.size(); }
};

struct Selection {
  Table table;
  std::size_t dropped = 0;
  bool data_available() const { return !table.rows.empty(); }
};

// Rows lacking any observed attribute or the label are dropped. Columns are
// emitted in schema order regardless of the order requested. Throws
// ContractError when `observed` is empty or contains `label`.
Selection select_columns(const Dataset& dataset, std::span<const Field> observed, Field label);
// Name-based variant; unknown names raise UnknownAttributeError.
Selection select_columns(const Dataset& dataset, const std::vector<std::string>& observed,
                         std::string_view label);

// Projects arbitrary records (e.g. alerts) onto columns; missing cells
// become empty strings. No label column.
Table project(std::span<const CtiRecord> records, std::span<const Field> columns);

// Versioned JSON persistence. load() verifies the stored fingerprint.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);
std::string dataset_to_json(const Dataset& dataset);
Dataset dataset_from_json(std::string_view text);

// Records as JSON objects keyed by field name (used for alert files too).
std::vector<CtiRecord> records_from_json(std::string_view text, std::string_view dataset_id);
// Records from a CSV whose header uses field names.
std::vector<CtiRecord> records_from_csv(std::string_view text, std::string_view dataset_id);

}  // namespace ctiv::ingest
