#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctiv/diagnostics.hpp"
#include "ctiv/evaluation/metrics.hpp"
#include "ctiv/features/encoder.hpp"
#include "ctiv/learners/algorithm.hpp"
#include "ctiv/learners/budget.hpp"
#include "ctiv/learners/classifier.hpp"
#include "ctiv/util/random.hpp"

namespace ctiv::learners {

// ---- split -----------------------------------------------------------------

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
  bool stratified = false;
};

// Seeded holdout split with |test| = round(test_fraction * N). Stratified by
// label when every class has at least two members; otherwise a plain
// shuffle, noted in `diagnostics`. Throws InsufficientDataError below two
// rows and ContractError for a fraction outside (0, 1).
SplitIndices split(std::span<const int> labels, double test_fraction, std::uint64_t seed,
                   Diagnostics* diagnostics = nullptr);

// ---- train -----------------------------------------------------------------

struct TrainOutcome {
  std::unique_ptr<Classifier> classifier;  // null when timed out
  double train_time = 0.0;
  bool timed_out = false;
  std::string reason;

  bool fitted() const { return classifier != nullptr; }
};

TrainOutcome train(Family family, const Hyperparams& params, const features::Matrix& x, std::span<const int> y,
                   std::size_t n_classes, const BuildBudget& budget, std::uint64_t seed);

// ---- tune ------------------------------------------------------------------

struct TrialResult {
  Hyperparams params;
  double f1 = 0.0;
  double seconds = 0.0;
  bool timed_out = false;
};

// Proposes the next hyperparameter point given the trials so far; nullopt
// ends the search.
class SearchStrategy {
 public:
  virtual ~SearchStrategy() = default;
  virtual std::optional<Hyperparams> next(const AlgorithmSpec& spec, std::span<const TrialResult> history,
                                          util::Rng& rng) = 0;
};

// Uniform draws without replacement from the grid, at most max_trials.
class RandomSearch : public SearchStrategy {
 public:
  explicit RandomSearch(std::size_t max_trials) : max_trials_(max_trials) {}
  std::optional<Hyperparams> next(const AlgorithmSpec& spec, std::span<const TrialResult> history,
                                  util::Rng& rng) override;

 private:
  std::size_t max_trials_;
};

struct TuneResult {
  Hyperparams best;
  double best_f1 = 0.0;
  std::vector<TrialResult> trials;
};

// Scores each proposal by macro F1 on an internal validation split of the
// training rows. Ties go to the lower cost_hint, then the earlier trial.
// Trials share `guard`; once it expires the search stops, and if no trial
// finished BudgetExceeded propagates.
TuneResult tune(const AlgorithmSpec& spec, const features::Matrix& x, std::span<const int> y, std::size_t n_classes,
                SearchStrategy& strategy, const BudgetGuard& guard, std::uint64_t seed,
                double validation_fraction = 0.25);

// ---- trained model ---------------------------------------------------------

struct Prediction {
  std::vector<std::string> labels;
  double seconds = 0.0;
};

// Immutable once built; shared between the registry and callers.
struct TrainedModel {
  static constexpr int kFormatVersion = 1;

  Family family = Family::dt;
  Hyperparams hyperparameters;
  features::EncoderSpec encoder;
  std::vector<std::string> classes;  // class code -> label
  std::shared_ptr<const Classifier> classifier;
  evaluation::EvalReport eval;
  evaluation::TimingReport timing;
  std::string requirement_key;
  std::string dataset_fingerprint;

  features::Scheme scheme() const { return encoder.scheme; }
  double f1() const { return eval.f1; }

  // Throws SpecMismatchError on a width mismatch.
  Prediction predict(const features::Matrix& x) const;
  // Encodes with the saved EncoderSpec first.
  Prediction predict(const ingest::Table& rows) const;
};

// Container: {"format_version", "manifest", "encoder", "parameters"}.
// Timing lives only in manifest.timing; include_timing=false drops it so
// two runs can be compared byte for byte.
nlohmann::json model_to_json_value(const TrainedModel& model, bool include_timing = true);
std::string model_to_json(const TrainedModel& model, bool include_timing = true);
TrainedModel model_from_json_value(const nlohmann::json& doc);
TrainedModel model_from_json(std::string_view text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace ctiv::learners
