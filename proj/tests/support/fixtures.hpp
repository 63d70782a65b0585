#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ctiv/ingest/dataset.hpp"
#include "ctiv/ingest/record.hpp"

namespace ctiv::testing {

// Domain "<noise>.<keyword>.<tld>" where the keyword alone decides the
// attack label. Every row has a distinct source address so nothing
// deduplicates away.
struct PlantedRule {
  std::vector<ingest::CtiRecord> records;
  std::vector<std::string> keywords;
  std::vector<std::string> labels;  // parallel to keywords

  std::string label_for_keyword(const std::string& keyword) const;
};

PlantedRule planted_rule(std::size_t rows, std::uint64_t seed, std::string dataset_id = "planted");

// Unlabelled alerts drawn from the same rule, plus their true labels.
struct Alerts {
  std::vector<ingest::CtiRecord> records;
  std::vector<std::string> truth;
};
Alerts planted_alerts(const PlantedRule& rule, std::size_t rows, std::uint64_t seed);

// Planted rule with a fraction of labels replaced by a uniformly drawn
// wrong class.
PlantedRule noisy_rule(std::size_t rows, double noise, std::uint64_t seed, std::string dataset_id = "noisy");

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace ctiv::testing
