#include "ctiv/features/text.hpp"

#include <cctype>

#include "ctiv/errors.hpp"
#include "ctiv/util/strings.hpp"

namespace ctiv::features {

std::string_view stemmer_name(Stemmer s) { return s == Stemmer::light ? "light" : "none"; }

Stemmer parse_stemmer(std::string_view name) {
  if (name == "light") return Stemmer::light;
  if (name == "none") return Stemmer::none;
  throw ConfigError("unknown stemmer '" + std::string(name) + "'");
}

std::string light_stem(std::string_view word) {
  std::string w(word);
  if (w.size() <= 3) return w;
  auto ends_with = [&](std::string_view suffix) {
    return w.size() >= suffix.size() && std::string_view(w).substr(w.size() - suffix.size()) == suffix;
  };
  if (ends_with("ies") && w.size() > 4) return w.substr(0, w.size() - 3) + "y";
  if (ends_with("sses")) return w.substr(0, w.size() - 2);
  if (ends_with("s") && !ends_with("ss") && !ends_with("us") && !ends_with("is"))
    return w.substr(0, w.size() - 1);
  return w;
}

std::set<std::string, std::less<>> default_stop_words() {
  return {"a",     "about", "above", "after",  "again", "against", "all",   "am",    "an",
          "and",   "any",   "are",   "as",     "at",    "be",      "been",  "before", "being",
          "below", "between", "both", "but",   "by",    "can",     "could", "did",   "do",
          "does",  "doing", "down",  "during", "each",  "few",     "for",   "from",  "further",
          "had",   "has",   "have",  "having", "he",    "her",     "here",  "hers",  "him",
          "his",   "how",   "i",     "if",     "in",    "into",    "is",    "it",    "its",
          "itself", "just", "me",    "more",   "most",  "my",      "no",    "nor",   "not",
          "now",   "of",    "off",   "on",     "once",  "only",    "or",    "other", "our",
          "ours",  "out",   "over",  "own",    "same",  "she",     "should", "so",   "some",
          "such",  "than",  "that",  "the",    "their", "theirs",  "them",  "then",  "there",
          "these", "they",  "this",  "those",  "through", "to",    "too",   "under", "until",
          "up",    "very",  "was",   "we",     "were",  "what",    "when",  "where", "which",
          "while", "who",   "whom",  "why",    "will",  "with",    "would", "you",   "your",
          "yours"};
}

TokenList clean_text(std::string_view text, const TextOptions& options) {
  TokenList out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::string word = std::move(token);
    token.clear();
    if (options.stop_words.count(word)) return;
    if (options.stemmer == Stemmer::light) word = light_stem(word);
    if (options.token_filter) {
      auto kept = options.token_filter(word);
      if (!kept || kept->empty()) return;
      word = std::move(*kept);
    }
    out.push_back(std::move(word));
  };
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      flush();
    } else if (uc < 0x80 && std::isalpha(uc)) {
      token.push_back(static_cast<char>(std::tolower(uc)));
    }
  }
  flush();
  return out;
}

TokenList tokenize_structured(std::string_view value, std::string_view delimiters) {
  TokenList out;
  value = util::trim(value);
  if (delimiters.empty()) {
    if (!value.empty()) out.emplace_back(value);
    return out;
  }
  std::string token;
  auto flush = [&] {
    if (!token.empty()) out.push_back(std::move(token));
    token.clear();
  };
  for (char c : value) {
    if (delimiters.find(c) != std::string_view::npos) {
      flush();
    } else if (std::isalnum(static_cast<unsigned char>(c))) {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

std::string_view structured_delimiters(ingest::Field field) {
  switch (field) {
    case ingest::Field::domain:
      return "/.";
    case ingest::Field::filename:
      return "._-";
    default:
      return "";
  }
}

}  // namespace ctiv::features
