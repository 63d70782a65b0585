#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctiv/diagnostics.hpp"
#include "ctiv/ingest/record.hpp"

namespace ctiv::ingest {

struct CsvRow {
  std::size_t line = 0;  // 1-based line where the row starts
  std::vector<std::string> cells;
};

// RFC 4180 style reader: quoted cells, doubled quotes, CRLF or LF line
// endings. Blank lines are skipped. Unquoted cells are returned verbatim.
std::vector<CsvRow> read_csv(std::string_view input, char delimiter = ',');

// Serializes one row, quoting cells that need it. No line terminator.
std::string write_csv_row(const std::vector<std::string>& cells, char delimiter = ',');

// One data row of a feed, with cells kept byte-for-byte as read.
struct RawFeedRecord {
  std::string source_id;
  std::size_t line = 0;
  std::vector<std::pair<std::string, std::string>> fields;

  const std::string* find(std::string_view column) const;
};

// Column name -> record field. A column may feed several fields (e.g. a
// datetime column mapped to both date and timestamp).
using ColumnMap = std::vector<std::pair<std::string, Field>>;

// Mapping for website feeds in the "Date, Domain, IP, Reverse Lookup,
// Description, ASN" layout; Description carries the attack label.
ColumnMap website_feed_column_map();

// Parses a delimited feed with a header row. Rows whose cell count differs
// from the header are reported in `diagnostics` and left out of the result.
// Throws FormatError on a missing/duplicate header and ConfigError when
// the column map names a column the header lacks.
std::vector<RawFeedRecord> parse_csv_feed(std::string_view input, std::string_view source_id,
                                          const ColumnMap& column_map, Diagnostics& diagnostics,
                                          char delimiter = ',');

// Maps raw rows onto records. "-" and blank cells are absent values; a cell
// that fails its slot's domain check is dropped with a report. Rows that
// end up with no attribute at all are reported and skipped.
std::vector<CtiRecord> to_cti_records(const std::vector<RawFeedRecord>& rows,
                                      const ColumnMap& column_map, std::string_view dataset_id,
                                      Diagnostics& diagnostics);

// Pluggable source of feed bytes. Only file-backed sources ship here; a live
// HTTP source implements the same interface.
class FeedSource {
 public:
  virtual ~FeedSource() = default;
  virtual std::string id() const = 0;
  virtual std::string fetch() = 0;
};

class FileFeedSource final : public FeedSource {
 public:
  explicit FileFeedSource(std::filesystem::path path) : path_(std::move(path)) {}
  std::string id() const override { return path_.filename().string(); }
  std::string fetch() override;

 private:
  std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path& path);

}  // namespace ctiv::ingest
