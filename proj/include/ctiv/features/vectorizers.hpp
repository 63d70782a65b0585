#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ctiv/features/matrix.hpp"
#include "ctiv/features/text.hpp"

namespace ctiv::features {

// Token -> column index, ordered by first appearance during fitting.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  // Fits over documents; throws EmptyVocabularyError when no document has
  // a token.
  static Vocabulary fit(std::span<const TokenList> documents);

  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<std::size_t> index(std::string_view token) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Raw term counts; out-of-vocabulary tokens are ignored.
std::vector<double> count_vector(const Vocabulary& vocab, const TokenList& document);

// Count vectorizer over a corpus: fitted vocabulary plus the count matrix.
struct CountVectorizer {
  Vocabulary vocabulary;

  static CountVectorizer fit(std::span<const TokenList> documents);
  Matrix transform(std::span<const TokenList> documents) const;
};

// Smoothed TF-IDF: tf is the raw in-document count, idf(t) =
// ln((1 + N) / (1 + df(t))) + 1, and each row is scaled to unit L2 norm
// (all-OOV rows stay zero).
struct TfidfVectorizer {
  Vocabulary vocabulary;
  std::vector<double> idf;

  static TfidfVectorizer fit(std::span<const TokenList> documents);
  std::vector<double> transform_one(const TokenList& document) const;
  Matrix transform(std::span<const TokenList> documents) const;
};

}  // namespace ctiv::features
