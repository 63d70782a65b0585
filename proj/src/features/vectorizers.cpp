#include "ctiv/features/vectorizers.hpp"

#include <cmath>
#include <unordered_set>

#include "ctiv/errors.hpp"

namespace ctiv::features {

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw ContractError("vocabulary cannot contain the empty token");
    if (!index_.emplace(tokens_[i], i).second)
      throw ContractError("vocabulary token '" + tokens_[i] + "' repeated");
  }
}

Vocabulary Vocabulary::fit(std::span<const TokenList> documents) {
  std::vector<std::string> tokens;
  std::unordered_set<std::string> seen;
  for (const auto& doc : documents) {
    for (const auto& token : doc) {
      if (!token.empty() && seen.insert(token).second) tokens.push_back(token);
    }
  }
  if (tokens.empty()) throw EmptyVocabularyError("all documents are empty");
  return Vocabulary(std::move(tokens));
}

std::optional<std::size_t> Vocabulary::index(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> count_vector(const Vocabulary& vocab, const TokenList& document) {
  std::vector<double> row(vocab.size(), 0.0);
  for (const auto& token : document) {
    if (auto i = vocab.index(token)) row[*i] += 1.0;
  }
  return row;
}

CountVectorizer CountVectorizer::fit(std::span<const TokenList> documents) {
  return {Vocabulary::fit(documents)};
}

Matrix CountVectorizer::transform(std::span<const TokenList> documents) const {
  Matrix m(documents.size(), vocabulary.size());
  for (std::size_t r = 0; r < documents.size(); ++r) {
    const auto row = count_vector(vocabulary, documents[r]);
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

TfidfVectorizer TfidfVectorizer::fit(std::span<const TokenList> documents) {
  TfidfVectorizer out;
  out.vocabulary = Vocabulary::fit(documents);
  std::vector<double> df(out.vocabulary.size(), 0.0);
  for (const auto& doc : documents) {
    std::unordered_set<std::size_t> present;
    for (const auto& token : doc) {
      if (auto i = out.vocabulary.index(token)) present.insert(*i);
    }
    for (auto i : present) df[i] += 1.0;
  }
  const double n = static_cast<double>(documents.size());
  out.idf.resize(df.size());
  for (std::size_t i = 0; i < df.size(); ++i) out.idf[i] = std::log((1.0 + n) / (1.0 + df[i])) + 1.0;
  return out;
}

std::vector<double> TfidfVectorizer::transform_one(const TokenList& document) const {
  auto row = count_vector(vocabulary, document);
  double norm = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    row[i] *= idf[i];
    norm += row[i] * row[i];
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& v : row) v /= norm;
  }
  return row;
}

Matrix TfidfVectorizer::transform(std::span<const TokenList> documents) const {
  Matrix m(documents.size(), vocabulary.size());
  for (std::size_t r = 0; r < documents.size(); ++r) {
    const auto row = transform_one(documents[r]);
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace ctiv::features
