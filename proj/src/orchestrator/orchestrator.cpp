#include "ctiv/orchestrator/orchestrator.hpp"

#include <algorithm>
#include <cstdio>

#include "ctiv/errors.hpp"

namespace ctiv::orchestrator {

using ingest::Field;

namespace {

std::string format_f1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

Predicted predict_with(const std::shared_ptr<const learners::TrainedModel>& model, const Requirement& requirement,
                       std::span<const ingest::CtiRecord> alerts, bool cache_hit) {
  const auto table = ingest::project(alerts, requirement.observed);
  auto prediction = model->predict(table);
  return Predicted{std::move(prediction.labels), model->f1(), model, cache_hit};
}

}  // namespace

std::string_view reason_name(NotApplicableReason reason) {
  switch (reason) {
    case NotApplicableReason::no_data: return "no-data";
    case NotApplicableReason::below_confidence: return "below-confidence";
    case NotApplicableReason::all_timed_out: return "all-timed-out";
  }
  return "?";
}

std::vector<Field> missing_attributes(const Requirement& requirement, const ingest::Dataset& dataset) {
  std::vector<Field> wanted = requirement.observed;
  wanted.push_back(requirement.unknown);
  std::vector<Field> missing;
  for (Field f : wanted) {
    const bool present = std::any_of(dataset.records().begin(), dataset.records().end(),
                                     [f](const ingest::CtiRecord& r) { return r.get(f).has_value(); });
    if (!present) missing.push_back(f);
  }
  if (missing.empty()) missing = wanted;
  std::sort(missing.begin(), missing.end());
  return missing;
}

ValidationOutcome Orchestrator::validate(const Requirement& requirement, std::span<const ingest::CtiRecord> alerts,
                                         const ingest::Dataset& dataset, const learners::BuildBudget& budget,
                                         std::uint64_t seed) {
  // Re-validate: callers may have assembled the struct by hand.
  const Requirement req =
      make_requirement(requirement.observed, requirement.unknown, requirement.confidence, requirement.dataset_id);
  ValidationOutcome outcome;
  outcome.requirement_key = requirement_key(req, dataset.fingerprint());
  const std::string& key = outcome.requirement_key;

  if (auto hit = registry_.lookup(key, req.confidence)) {
    outcome.result = predict_with(hit, req, alerts, true);
    return outcome;
  }

  const auto selection = ingest::select_columns(dataset, req.observed, req.unknown);
  if (selection.table.size() < 2) {
    auto missing = missing_attributes(req, dataset);
    std::string names;
    for (Field f : missing) names += (names.empty() ? "" : ", ") + std::string(ingest::field_name(f));
    log_.notify(Channel::threat_intel_team, key, "no-data", "threat data needed for: " + names);
    log_.notify(Channel::security_team, key, "no-data", "requirement cannot be validated until data arrives");
    outcome.result = NotApplicable{NotApplicableReason::no_data,
                                   std::to_string(selection.table.size()) + " usable rows", std::nullopt};
    outcome.data_requested = DataRequested{std::move(missing)};
    return outcome;
  }

  const auto recheck = [&]() -> std::shared_ptr<const BuildReport> {
    auto model = registry_.lookup(key, req.confidence);
    if (!model) return nullptr;
    auto report = std::make_shared<BuildReport>();
    report->selected = std::move(model);
    report->served_from_registry = true;
    return report;
  };
  const auto build = [&]() {
    BuildReport report;
    const auto candidates = learners::build_candidates(selection.table, {key, dataset.fingerprint()}, budget, seed,
                                                       options_.build);
    for (const auto& c : candidates) {
      report.candidates.push_back(
          {c.family, c.scheme, c.status, c.model ? c.model->f1() : 0.0, c.elapsed, c.message});
    }
    if (auto best = learners::select_optimal(std::span<const learners::Candidate>(candidates))) {
      report.selected = std::make_shared<const learners::TrainedModel>(std::move(*best));
      if (report.selected->f1() >= req.confidence) report.registered = registry_.register_model(report.selected);
    }
    return report;
  };
  outcome.build = registry_.build_once(key, recheck, build);
  const auto& report = *outcome.build;

  if (!report.selected) {
    log_.notify(Channel::data_science_team, key, "all-timed-out",
                "no candidate model finished within its budget");
    outcome.result = NotApplicable{NotApplicableReason::all_timed_out,
                                   std::to_string(report.candidates.size()) + " candidates, none fitted",
                                   std::nullopt};
    return outcome;
  }
  if (report.selected->f1() < req.confidence) {
    log_.notify(Channel::data_science_team, key, "below-confidence",
                "best model " + std::string(learners::family_name(report.selected->family)) + " reached F1 " +
                    format_f1(report.selected->f1()) + " below the requested " + format_f1(req.confidence));
    outcome.result =
        NotApplicable{NotApplicableReason::below_confidence, "best F1 " + format_f1(report.selected->f1()),
                      report.selected->f1()};
    return outcome;
  }
  outcome.result = predict_with(report.selected, req, alerts, report.served_from_registry);
  return outcome;
}

}  // namespace ctiv::orchestrator
