#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ctiv/ingest/record.hpp"

namespace ctiv::features {

using TokenList = std::vector<std::string>;

enum class Stemmer { none, light };

std::string_view stemmer_name(Stemmer s);
Stemmer parse_stemmer(std::string_view name);

// Strips regular English plural endings ("ies" -> "y", "sses" -> "ss",
// trailing "s" except after "s", "u" or "i"). Words of three letters or
// fewer are left alone.
std::string light_stem(std::string_view word);

std::set<std::string, std::less<>> default_stop_words();

struct TextOptions {
  std::set<std::string, std::less<>> stop_words = default_stop_words();
  Stemmer stemmer = Stemmer::light;
  // Runs last on each surviving token; returning nullopt drops it. Not
  // persisted with an encoder spec.
  std::function<std::optional<std::string>(std::string_view)> token_filter;
};

// Whitespace tokenization, then every non-alphabetic character is removed
// from each token (so "C2-server" becomes "cserver"), tokens are
// lowercased, stop words dropped and the stemmer/filter applied.
TokenList clean_text(std::string_view text, const TextOptions& options);

// Splits on any character in `delimiters` and removes non-alphanumeric
// characters from each piece; empty pieces are dropped. An empty delimiter
// set keeps the trimmed value as a single token.
TokenList tokenize_structured(std::string_view value, std::string_view delimiters);

// Delimiters for structured-string attributes: domain "/." (which also
// covers "//"), filename "._-", file_hash none.
std::string_view structured_delimiters(ingest::Field field);

}  // namespace ctiv::features
