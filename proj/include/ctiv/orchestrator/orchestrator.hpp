#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ctiv/ingest/dataset.hpp"
#include "ctiv/learners/build.hpp"
#include "ctiv/orchestrator/notify.hpp"
#include "ctiv/orchestrator/registry.hpp"
#include "ctiv/orchestrator/requirement.hpp"

namespace ctiv::orchestrator {

struct Predicted {
  std::vector<std::string> labels;  // one per alert row
  double f1 = 0.0;
  std::shared_ptr<const learners::TrainedModel> model;
  bool cache_hit = false;
};

enum class NotApplicableReason { no_data, below_confidence, all_timed_out };

std::string_view reason_name(NotApplicableReason reason);

struct NotApplicable {
  NotApplicableReason reason = NotApplicableReason::no_data;
  std::string detail;
  std::optional<double> best_f1;  // set for below-confidence
};

struct DataRequested {
  std::vector<ingest::Field> missing;
};

struct ValidationOutcome {
  std::string requirement_key;
  std::variant<Predicted, NotApplicable> result;
  std::optional<DataRequested> data_requested;  // only with no-data
  std::shared_ptr<const BuildReport> build;     // null on a cache hit

  bool predicted() const { return std::holds_alternative<Predicted>(result); }
  const Predicted* as_predicted() const { return std::get_if<Predicted>(&result); }
  const NotApplicable* as_not_applicable() const { return std::get_if<NotApplicable>(&result); }
};

struct OrchestratorOptions {
  learners::BuildOptions build;
};

// Serves validation requests: a registry hit answers directly; a miss with
// data behind it builds every candidate once (deduplicated across
// concurrent identical requests), keeps the best model only if it clears
// the requested confidence, and answers with it; a miss without data asks
// for data. Algorithm outcomes are values; only contract and schema
// violations throw.
class Orchestrator {
 public:
  Orchestrator(ModelRegistry& registry, NotificationLog& log, OrchestratorOptions options = {})
      : registry_(registry), log_(log), options_(std::move(options)) {}

  ValidationOutcome validate(const Requirement& requirement, std::span<const ingest::CtiRecord> alerts,
                             const ingest::Dataset& dataset, const learners::BuildBudget& budget,
                             std::uint64_t seed);

  ModelRegistry& registry() { return registry_; }

 private:
  ModelRegistry& registry_;
  NotificationLog& log_;
  OrchestratorOptions options_;
};

// Attributes of the requirement that no dataset record carries; all of
// them when each is present somewhere but never together.
std::vector<ingest::Field> missing_attributes(const Requirement& requirement, const ingest::Dataset& dataset);

}  // namespace ctiv::orchestrator
