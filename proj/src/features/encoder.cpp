#include "ctiv/features/encoder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "ctiv/errors.hpp"
#include "ctiv/features/encoder_json.hpp"
#include "ctiv/util/civil_time.hpp"

namespace ctiv::features {

using ingest::Field;
using nlohmann::json;

std::string_view kind_name(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::categorical: return "categorical";
    case AttributeKind::structured_string: return "structured-string";
    case AttributeKind::free_text: return "free-text";
    case AttributeKind::numeric: return "numeric";
    case AttributeKind::date: return "date";
    case AttributeKind::timestamp: return "timestamp";
    case AttributeKind::ip: return "ip";
  }
  return "?";
}

AttributeKind attribute_kind(Field field) {
  switch (field) {
    case Field::domain:
    case Field::filename:
    case Field::file_hash:
      return AttributeKind::structured_string;
    case Field::description:
    case Field::comment:
    case Field::event:
      return AttributeKind::free_text;
    case Field::date:
      return AttributeKind::date;
    case Field::timestamp:
      return AttributeKind::timestamp;
    case Field::ip_dst:
    case Field::ip_src:
      return AttributeKind::ip;
    default:
      return AttributeKind::categorical;
  }
}

std::string_view scheme_name(Scheme scheme) {
  return scheme == Scheme::label_tfidf ? "label+tfidf" : "onehot+count";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "label+tfidf") return Scheme::label_tfidf;
  if (name == "onehot+count") return Scheme::onehot_count;
  throw ConfigError("unknown encoding scheme '" + std::string(name) + "'");
}

std::size_t artifact_width(const Artifact& artifact) {
  return std::visit(
      [](const auto& a) -> std::size_t {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, LabelArtifact> || std::is_same_v<T, ScaleArtifact>) {
          return 1;
        } else if constexpr (std::is_same_v<T, OneHotArtifact>) {
          return a.map.size();
        } else {
          return a.vocabulary.size();
        }
      },
      artifact);
}

std::string_view artifact_kind_name(const Artifact& artifact) {
  static constexpr std::string_view kNames[] = {"label", "one-hot", "count", "tfidf", "scale"};
  return kNames[artifact.index()];
}

std::size_t EncoderSpec::width() const {
  std::size_t w = 0;
  for (const auto& c : columns) w += artifact_width(c.artifact);
  return w;
}

std::vector<Field> EncoderSpec::schema() const {
  std::vector<Field> out;
  for (const auto& c : columns) out.push_back(c.source);
  return out;
}

TextOptions EncoderSpec::text_options() const {
  TextOptions t;
  t.stop_words = {stop_words.begin(), stop_words.end()};
  t.stemmer = stemmer;
  return t;
}

TokenList tokenize_cell(Field field, std::string_view value, const TextOptions& options) {
  if (attribute_kind(field) == AttributeKind::free_text) return clean_text(value, options);
  return tokenize_structured(value, structured_delimiters(field));
}

namespace {

double numeric_value(Field field, std::string_view cell, bool& ok) {
  ok = true;
  if (field == Field::date) {
    if (auto d = util::parse_date(cell)) return static_cast<double>(util::days_from_civil(*d));
  } else if (auto s = util::parse_unix_seconds(cell)) {
    return static_cast<double>(*s);
  }
  ok = false;
  return 0.0;
}

std::vector<TokenList> tokenize_column(const ingest::Table& table, std::size_t c,
                                       const TextOptions& options) {
  std::vector<TokenList> docs;
  docs.reserve(table.rows.size());
  for (const auto& row : table.rows) docs.push_back(tokenize_cell(table.columns[c], row[c], options));
  return docs;
}

// Writes one column block into `out` starting at `offset`.
void write_block(const ColumnEncoder& enc, const ingest::Table& table, std::size_t c,
                 const TextOptions& options, Matrix& out, std::size_t offset) {
  const auto& rows = table.rows;
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, LabelArtifact>) {
          for (std::size_t r = 0; r < rows.size(); ++r)
            out(r, offset) = static_cast<double>(a.map.code(rows[r][c]));
        } else if constexpr (std::is_same_v<T, OneHotArtifact>) {
          for (std::size_t r = 0; r < rows.size(); ++r) {
            if (auto code = a.map.code(rows[r][c]); code != CategoryMap::kUnknown)
              out(r, offset + code - 1) = 1.0;
          }
        } else if constexpr (std::is_same_v<T, CountArtifact>) {
          for (std::size_t r = 0; r < rows.size(); ++r) {
            for (const auto& token : tokenize_cell(enc.source, rows[r][c], options))
              if (auto i = a.vocabulary.index(token)) out(r, offset + *i) += 1.0;
          }
        } else if constexpr (std::is_same_v<T, TfidfArtifact>) {
          TfidfVectorizer vec{a.vocabulary, a.idf};
          for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto values = vec.transform_one(tokenize_cell(enc.source, rows[r][c], options));
            std::copy(values.begin(), values.end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(offset));
          }
        } else {
          for (std::size_t r = 0; r < rows.size(); ++r) {
            bool ok = false;
            const double x = numeric_value(enc.source, rows[r][c], ok);
            out(r, offset) = ok ? a.scaler.apply(x) : 0.0;
          }
        }
      },
      enc.artifact);
}

void append_provenance(const ColumnEncoder& enc, std::vector<ColumnProvenance>& out) {
  const std::string kind(artifact_kind_name(enc.artifact));
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, OneHotArtifact>) {
          for (const auto& cat : a.map.categories()) out.push_back({enc.source, kind, cat});
        } else if constexpr (std::is_same_v<T, CountArtifact> || std::is_same_v<T, TfidfArtifact>) {
          for (const auto& tok : a.vocabulary.tokens()) out.push_back({enc.source, kind, tok});
        } else {
          out.push_back({enc.source, kind, ""});
        }
      },
      enc.artifact);
}

FeatureMatrix apply(const ingest::Table& table, const EncoderSpec& spec, const TextOptions& options) {
  FeatureMatrix fm{Matrix(table.rows.size(), spec.width()), {}};
  std::size_t offset = 0;
  for (std::size_t c = 0; c < spec.columns.size(); ++c) {
    write_block(spec.columns[c], table, c, options, fm.values, offset);
    append_provenance(spec.columns[c], fm.provenance);
    offset += artifact_width(spec.columns[c].artifact);
  }
  return fm;
}

}  // namespace

FitResult fit_transform(const ingest::Table& table, Scheme scheme, std::uint64_t seed,
                        const TextOptions& text) {
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw ContractError("table row width differs from its columns");
  }
  EncoderSpec spec;
  spec.scheme = scheme;
  spec.seed = seed;
  spec.stop_words.assign(text.stop_words.begin(), text.stop_words.end());
  spec.stemmer = text.stemmer;

  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const Field field = table.columns[c];
    const AttributeKind kind = attribute_kind(field);
    ColumnEncoder enc{field, kind, LabelArtifact{}};
    switch (kind) {
      case AttributeKind::categorical:
      case AttributeKind::ip:
      case AttributeKind::numeric: {
        std::vector<std::string> column;
        column.reserve(table.rows.size());
        for (const auto& row : table.rows) column.push_back(row[c]);
        auto map = CategoryMap::fit(column);
        if (scheme == Scheme::label_tfidf) {
          enc.artifact = LabelArtifact{std::move(map)};
        } else {
          enc.artifact = OneHotArtifact{std::move(map)};
        }
        break;
      }
      case AttributeKind::structured_string:
      case AttributeKind::free_text: {
        const auto docs = tokenize_column(table, c, text);
        const bool any = std::any_of(docs.begin(), docs.end(), [](const auto& d) { return !d.empty(); });
        if (scheme == Scheme::label_tfidf) {
          if (any) {
            auto vec = TfidfVectorizer::fit(docs);
            enc.artifact = TfidfArtifact{std::move(vec.vocabulary), std::move(vec.idf)};
          } else {
            enc.artifact = TfidfArtifact{};
          }
        } else {
          enc.artifact = any ? CountArtifact{Vocabulary::fit(docs)} : CountArtifact{};
        }
        break;
      }
      case AttributeKind::date:
      case AttributeKind::timestamp: {
        std::vector<double> values;
        for (const auto& row : table.rows) {
          bool ok = false;
          const double x = numeric_value(field, row[c], ok);
          if (ok) values.push_back(x);
        }
        enc.artifact = ScaleArtifact{values.empty() ? Scaler{} : Scaler::fit(values)};
        break;
      }
    }
    spec.columns.push_back(std::move(enc));
  }
  auto matrix = apply(table, spec, text);
  return {std::move(matrix), std::move(spec)};
}

FeatureMatrix transform(const ingest::Table& table, const EncoderSpec& spec) {
  if (table.columns != spec.schema()) throw SpecMismatchError("table columns differ from the encoder schema");
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw ContractError("table row width differs from its columns");
  }
  return apply(table, spec, spec.text_options());
}

// ---- persistence ----------------------------------------------------------

json encoder_to_json_value(const EncoderSpec& spec) {
  json manifest;
  manifest["scheme"] = std::string(scheme_name(spec.scheme));
  manifest["seed"] = spec.seed;
  manifest["stemmer"] = std::string(stemmer_name(spec.stemmer));
  manifest["stop_words"] = spec.stop_words;
  json schema = json::array();
  json widths = json::array();
  json artifacts = json::array();
  for (const auto& c : spec.columns) {
    schema.push_back({{"field", std::string(ingest::field_name(c.source))},
                      {"kind", std::string(kind_name(c.kind))}});
    widths.push_back(artifact_width(c.artifact));
    json a;
    a["type"] = std::string(artifact_kind_name(c.artifact));
    std::visit(
        [&](const auto& art) {
          using T = std::decay_t<decltype(art)>;
          if constexpr (std::is_same_v<T, LabelArtifact> || std::is_same_v<T, OneHotArtifact>) {
            a["categories"] = art.map.categories();
          } else if constexpr (std::is_same_v<T, CountArtifact>) {
            a["vocabulary"] = art.vocabulary.tokens();
          } else if constexpr (std::is_same_v<T, TfidfArtifact>) {
            a["vocabulary"] = art.vocabulary.tokens();
            a["idf"] = art.idf;
          } else {
            a["mean"] = art.scaler.mean;
            a["stddev"] = art.scaler.stddev;
          }
        },
        c.artifact);
    artifacts.push_back(std::move(a));
  }
  manifest["schema"] = std::move(schema);
  manifest["widths"] = std::move(widths);
  return {{"format_version", EncoderSpec::kFormatVersion},
          {"manifest", std::move(manifest)},
          {"artifacts", std::move(artifacts)}};
}

EncoderSpec encoder_from_json_value(const json& doc) {
  try {
    if (doc.at("format_version").get<int>() != EncoderSpec::kFormatVersion)
      throw FormatError("unsupported encoder format version");
    const auto& manifest = doc.at("manifest");
    EncoderSpec spec;
    spec.scheme = parse_scheme(manifest.at("scheme").get<std::string>());
    spec.seed = manifest.at("seed").get<std::uint64_t>();
    spec.stemmer = parse_stemmer(manifest.at("stemmer").get<std::string>());
    spec.stop_words = manifest.at("stop_words").get<std::vector<std::string>>();
    const auto& schema = manifest.at("schema");
    const auto& widths = manifest.at("widths");
    const auto& artifacts = doc.at("artifacts");
    if (schema.size() != artifacts.size() || widths.size() != artifacts.size())
      throw FormatError("encoder manifest and artifacts disagree");
    for (std::size_t i = 0; i < artifacts.size(); ++i) {
      const Field field = ingest::parse_field(schema[i].at("field").get<std::string>());
      const auto& a = artifacts[i];
      const auto type = a.at("type").get<std::string>();
      Artifact artifact;
      if (type == "label") {
        artifact = LabelArtifact{CategoryMap(a.at("categories").get<std::vector<std::string>>())};
      } else if (type == "one-hot") {
        artifact = OneHotArtifact{CategoryMap(a.at("categories").get<std::vector<std::string>>())};
      } else if (type == "count") {
        artifact = CountArtifact{Vocabulary(a.at("vocabulary").get<std::vector<std::string>>())};
      } else if (type == "tfidf") {
        TfidfArtifact t{Vocabulary(a.at("vocabulary").get<std::vector<std::string>>()),
                        a.at("idf").get<std::vector<double>>()};
        if (t.idf.size() != t.vocabulary.size()) throw FormatError("idf width differs from vocabulary");
        artifact = std::move(t);
      } else if (type == "scale") {
        artifact = ScaleArtifact{Scaler{a.at("mean").get<double>(), a.at("stddev").get<double>()}};
      } else {
        throw FormatError("unknown encoder artifact '" + type + "'");
      }
      if (artifact_width(artifact) != widths[i].get<std::size_t>())
        throw FormatError("encoder artifact width differs from manifest");
      spec.columns.push_back({field, attribute_kind(field), std::move(artifact)});
    }
    return spec;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed encoder spec: ") + e.what());
  }
}

std::string encoder_to_json(const EncoderSpec& spec) { return encoder_to_json_value(spec).dump(); }

EncoderSpec encoder_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("encoder spec is not JSON: ") + e.what());
  }
  return encoder_from_json_value(doc);
}

}  // namespace ctiv::features
