#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctiv/ingest/record.hpp"

namespace ctiv::bench {

// Number of nonempty proper subsets of n feature groups, 2^n - 2. Throws
// ContractError for n < 2 or n > 63.
std::uint64_t count_feature_combinations(std::size_t n_features);

struct BenchPlan {
  std::string name;
  std::size_t n_features = 0;
  std::size_t n_algorithms = 8;
  std::size_t n_encodings = 2;
  std::size_t n_labels = 1;
  std::size_t requirement_count = 0;

  // Throws ContractError unless every count is positive and n_features >= 2.
  void validate() const;
};

enum class Mode { prebuild_all, on_demand };

// prebuild-all: combinations x algorithms x encodings x labels.
// on-demand:    requirements x labels x algorithms x encodings.
std::uint64_t count_experiments(const BenchPlan& plan, Mode mode);

// Feature groups behind the two reference plans. Each group is one unit in
// the combination count; membership is data, not code, so other groupings
// can be benchmarked too.
using FeatureGroups = std::vector<std::vector<ingest::Field>>;
FeatureGroups website_feed_groups();  // 6 groups
FeatureGroups misp_feed_groups();     // 13 groups

// Website feed: 6 groups, 1 label, 7 requirement sets. MISP feed: 13
// groups, 4 labels, 11 requirement sets.
BenchPlan website_feed_plan();
BenchPlan misp_feed_plan();

struct TimingSample {
  double seconds = 0.0;
  bool timed_out = false;
};

struct PlanCounts {
  std::string name;
  std::uint64_t prebuild = 0;
  std::uint64_t on_demand = 0;
};

struct BenchReport {
  std::vector<PlanCounts> plans;
  std::uint64_t prebuild_total = 0;
  std::uint64_t on_demand_total = 0;
  double ratio = 0.0;    // on_demand / prebuild
  double savings = 0.0;  // 1 - ratio
  std::size_t samples = 0;
  double mean_seconds = 0.0;
  double timed_out_fraction = 0.0;
  double prebuild_seconds = 0.0;   // mean x prebuild_total
  double on_demand_seconds = 0.0;  // mean x on_demand_total
};

// Throws ContractError without plans or samples.
BenchReport bench_report(std::span<const BenchPlan> plans, std::span<const TimingSample> samples);

nlohmann::json report_to_json(const BenchReport& report);
std::string report_to_text(const BenchReport& report);

}  // namespace ctiv::bench
