#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctiv/features/encoder.hpp"
#include "ctiv/ingest/dataset.hpp"
#include "ctiv/learners/model.hpp"

namespace ctiv::learners {

struct BuildOptions {
  std::vector<Tier> tiers = {Tier::required};
  // When set, replaces the tier selection.
  std::optional<std::vector<Family>> families;
  std::vector<features::Scheme> schemes = {features::Scheme::label_tfidf, features::Scheme::onehot_count};
  double test_fraction = 0.3;
  std::size_t n_trials = 4;
  std::size_t parallelism = 1;
  // Per-family replacements for the shared budget.
  std::map<Family, BuildBudget> family_budgets;
  // Defaults to RandomSearch(n_trials).
  std::function<std::unique_ptr<SearchStrategy>(Family)> strategy;
  features::TextOptions text;

  std::vector<Family> enabled_families() const;
  BuildBudget budget_for(Family family, const BuildBudget& shared) const;
};

enum class CandidateStatus { fitted, timed_out, failed };

std::string_view status_name(CandidateStatus status);

struct Candidate {
  Family family = Family::dt;
  features::Scheme scheme = features::Scheme::label_tfidf;
  CandidateStatus status = CandidateStatus::failed;
  std::optional<TrainedModel> model;  // set only when fitted
  double elapsed = 0.0;
  std::string message;
};

struct CandidateRequest {
  std::string requirement_key;
  std::string dataset_fingerprint;
};

// Every (scheme, family) pair: encoders fitted on the training split, then
// tune, train and evaluate on the held-out split. The split is shared by
// all candidates. Up to options.parallelism candidates run at once; the
// result order is scheme-major and independent of scheduling. Throws
// ContractError when the table has no label column and
// InsufficientDataError below two rows.
std::vector<Candidate> build_candidates(const ingest::Table& table, const CandidateRequest& request,
                                        const BuildBudget& budget, std::uint64_t seed,
                                        const BuildOptions& options = {});

// Highest test F1; ties go to the lower computation time, then family
// order, then scheme order. nullopt when there is nothing to choose from.
std::optional<TrainedModel> select_optimal(std::span<const TrainedModel> models);
// Considers fitted candidates only.
std::optional<TrainedModel> select_optimal(std::span<const Candidate> candidates);

}  // namespace ctiv::learners
