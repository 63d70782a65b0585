#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctiv/features/categorical.hpp"
#include "ctiv/features/matrix.hpp"
#include "ctiv/features/text.hpp"
#include "ctiv/features/vectorizers.hpp"
#include "ctiv/ingest/dataset.hpp"
#include "ctiv/ingest/record.hpp"

namespace ctiv::features {

enum class AttributeKind { categorical, structured_string, free_text, numeric, date, timestamp, ip };

std::string_view kind_name(AttributeKind kind);
// Static kind of every record slot.
AttributeKind attribute_kind(ingest::Field field);

// The two encoding pipelines: categoricals label-encoded with TF-IDF text,
// or one-hot categoricals with count-vectorized text.
enum class Scheme { label_tfidf, onehot_count };

std::string_view scheme_name(Scheme scheme);
Scheme parse_scheme(std::string_view name);

struct LabelArtifact {
  CategoryMap map;
  friend bool operator==(const LabelArtifact&, const LabelArtifact&) = default;
};
struct OneHotArtifact {
  CategoryMap map;
  friend bool operator==(const OneHotArtifact&, const OneHotArtifact&) = default;
};
struct CountArtifact {
  Vocabulary vocabulary;
  friend bool operator==(const CountArtifact&, const CountArtifact&) = default;
};
struct TfidfArtifact {
  Vocabulary vocabulary;
  std::vector<double> idf;
  friend bool operator==(const TfidfArtifact&, const TfidfArtifact&) = default;
};
// Dates become days since 1970-01-01, timestamps Unix seconds; both are
// then standardized. Unparseable cells at transform time map to the mean.
struct ScaleArtifact {
  Scaler scaler;
  friend bool operator==(const ScaleArtifact& a, const ScaleArtifact& b) {
    return a.scaler.mean == b.scaler.mean && a.scaler.stddev == b.scaler.stddev;
  }
};

using Artifact = std::variant<LabelArtifact, OneHotArtifact, CountArtifact, TfidfArtifact, ScaleArtifact>;

std::size_t artifact_width(const Artifact& artifact);
std::string_view artifact_kind_name(const Artifact& artifact);

struct ColumnEncoder {
  ingest::Field source;
  AttributeKind kind;
  Artifact artifact;
  friend bool operator==(const ColumnEncoder&, const ColumnEncoder&) = default;
};

// Replayable feature-engineering scheme fitted on one column schema.
struct EncoderSpec {
  static constexpr int kFormatVersion = 1;

  Scheme scheme = Scheme::label_tfidf;
  std::uint64_t seed = 0;
  std::vector<std::string> stop_words;
  Stemmer stemmer = Stemmer::light;
  std::vector<ColumnEncoder> columns;

  std::size_t width() const;
  std::vector<ingest::Field> schema() const;
  TextOptions text_options() const;

  friend bool operator==(const EncoderSpec&, const EncoderSpec&) = default;
};

struct ColumnProvenance {
  ingest::Field source;
  std::string artifact;  // "label", "one-hot", "count", "tfidf", "scale"
  std::string item;      // token or category; empty for label/scale columns
};

struct FeatureMatrix {
  Matrix values;
  std::vector<ColumnProvenance> provenance;

  std::size_t rows() const { return values.rows(); }
  std::size_t cols() const { return values.cols(); }
};

// Tokens a cell of `field` produces under the given text options.
TokenList tokenize_cell(ingest::Field field, std::string_view value, const TextOptions& options);

struct FitResult {
  FeatureMatrix matrix;
  EncoderSpec spec;
};

// Fits an encoder per column of `table` and returns the transformed rows.
// Text columns whose cells yield no token get a zero-width vocabulary.
FitResult fit_transform(const ingest::Table& table, Scheme scheme, std::uint64_t seed = 0,
                        const TextOptions& text = {});

// Replays a fitted spec. Throws SpecMismatchError when the table's columns
// differ from the spec's schema.
FeatureMatrix transform(const ingest::Table& table, const EncoderSpec& spec);

// Versioned JSON document: {"format_version", "manifest", "artifacts"}.
std::string encoder_to_json(const EncoderSpec& spec);
EncoderSpec encoder_from_json(std::string_view text);

}  // namespace ctiv::features
