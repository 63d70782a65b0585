#include "ctiv/ingest/csv_feed.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "ctiv/errors.hpp"
#include "ctiv/util/strings.hpp"

namespace ctiv::ingest {

std::vector<CsvRow> read_csv(std::string_view input, char delimiter) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string cell;
  bool in_quotes = false;
  bool row_has_content = false;
  std::size_t line = 1;
  row.line = 1;

  auto end_cell = [&] {
    row.cells.push_back(std::move(cell));
    cell.clear();
  };
  auto end_row = [&] {
    if (row_has_content || row.cells.size() > 0) {
      end_cell();
      rows.push_back(std::move(row));
    }
    row = CsvRow{};
    row_has_content = false;
  };

  for (std::size_t i = 0; i < input.size(); ++i) {
    const char c = input[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < input.size() && input[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        cell.push_back(c);
      }
      continue;
    }
    if (c == '"' && cell.empty()) {
      in_quotes = true;
      row_has_content = true;
    } else if (c == delimiter) {
      end_cell();
      row_has_content = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < input.size() && input[i + 1] == '\n') ++i;
      end_row();
      ++line;
      row.line = line;
    } else {
      cell.push_back(c);
      row_has_content = true;
    }
  }
  if (in_quotes) throw FormatError("unterminated quoted cell starting before line " + std::to_string(line));
  end_row();
  return rows;
}

std::string write_csv_row(const std::vector<std::string>& cells, char delimiter) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out.push_back(delimiter);
    const auto& cell = cells[i];
    const bool quote = cell.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string::npos;
    if (!quote) {
      out += cell;
      continue;
    }
    out.push_back('"');
    for (char c : cell) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    out.push_back('"');
  }
  return out;
}

const std::string* RawFeedRecord::find(std::string_view column) const {
  for (const auto& [name, value] : fields) {
    if (name == column) return &value;
  }
  return nullptr;
}

ColumnMap website_feed_column_map() {
  return {{"Date", Field::date},
          {"Domain", Field::domain},
          {"IP", Field::ip_src},
          {"Description", Field::attack},
          {"ASN", Field::asn}};
}

std::vector<RawFeedRecord> parse_csv_feed(std::string_view input, std::string_view source_id,
                                          const ColumnMap& column_map, Diagnostics& diagnostics,
                                          char delimiter) {
  auto rows = read_csv(input, delimiter);
  if (rows.empty()) throw FormatError("feed '" + std::string(source_id) + "' has no header row");

  std::vector<std::string> header;
  std::set<std::string> seen;
  for (const auto& cell : rows.front().cells) {
    std::string name(util::trim(cell));
    if (name.empty()) throw FormatError("feed '" + std::string(source_id) + "' has an empty column name");
    if (!seen.insert(name).second)
      throw FormatError("feed '" + std::string(source_id) + "' repeats column '" + name + "'");
    header.push_back(std::move(name));
  }
  for (const auto& [column, field] : column_map) {
    if (!seen.count(column)) {
      throw ConfigError("column map names '" + column + "' (" + std::string(field_name(field)) +
                        ") but feed '" + std::string(source_id) + "' has no such column");
    }
  }

  std::vector<RawFeedRecord> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto& row = rows[r];
    if (row.cells.size() != header.size()) {
      diagnostics.add(std::string(source_id), row.line,
                      "expected " + std::to_string(header.size()) + " cells, found " +
                          std::to_string(row.cells.size()));
      continue;
    }
    RawFeedRecord rec{std::string(source_id), row.line, {}};
    rec.fields.reserve(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) rec.fields.emplace_back(header[c], std::move(row.cells[c]));
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<CtiRecord> to_cti_records(const std::vector<RawFeedRecord>& rows,
                                      const ColumnMap& column_map, std::string_view dataset_id,
                                      Diagnostics& diagnostics) {
  std::vector<CtiRecord> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    CtiRecord rec{std::string(dataset_id)};
    for (const auto& [column, field] : column_map) {
      const std::string* cell = row.find(column);
      if (!cell) continue;
      const auto value = util::trim(*cell);
      if (value.empty() || value == "-") continue;
      if (!rec.try_set(field, value)) {
        diagnostics.add(row.source_id, row.line,
                        "dropped invalid " + std::string(field_name(field)) + " value '" +
                            std::string(value) + "'");
      }
    }
    if (rec.empty()) {
      diagnostics.add(row.source_id, row.line, "row carries no usable attribute");
      continue;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string FileFeedSource::fetch() { return read_file(path_); }

}  // namespace ctiv::ingest
