#include "ctiv/learners/build.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <set>
#include <thread>

#include "ctiv/errors.hpp"

namespace ctiv::learners {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct EncodedScheme {
  features::Scheme scheme;
  std::optional<features::EncoderSpec> encoder;
  features::Matrix train;
  features::Matrix test;
  std::string error;
};

ingest::Table subset(const ingest::Table& table, std::span<const std::size_t> rows) {
  ingest::Table out;
  out.columns = table.columns;
  out.label = table.label;
  for (auto i : rows) {
    out.rows.push_back(table.rows[i]);
    out.labels.push_back(table.labels[i]);
  }
  return out;
}

}  // namespace

std::vector<Family> BuildOptions::enabled_families() const {
  if (families) return *families;
  return families_in(tiers);
}

BuildBudget BuildOptions::budget_for(Family family, const BuildBudget& shared) const {
  auto it = family_budgets.find(family);
  return it == family_budgets.end() ? shared : it->second;
}

std::string_view status_name(CandidateStatus status) {
  switch (status) {
    case CandidateStatus::fitted: return "fitted";
    case CandidateStatus::timed_out: return "timed-out";
    case CandidateStatus::failed: return "failed";
  }
  return "?";
}

std::vector<Candidate> build_candidates(const ingest::Table& table, const CandidateRequest& request,
                                        const BuildBudget& budget, std::uint64_t seed, const BuildOptions& options) {
  if (!table.label) throw ContractError("candidate building needs a label column");
  if (table.labels.size() != table.rows.size()) throw ContractError("label count does not match row count");

  const std::set<std::string> distinct(table.labels.begin(), table.labels.end());
  const std::vector<std::string> classes(distinct.begin(), distinct.end());
  std::vector<int> y(table.labels.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), table.labels[i]) - classes.begin());

  const auto holdout = split(y, options.test_fraction, seed);
  const auto train_table = subset(table, holdout.train);
  const auto test_table = subset(table, holdout.test);
  std::vector<int> y_train, y_test;
  for (auto i : holdout.train) y_train.push_back(y[i]);
  for (auto i : holdout.test) y_test.push_back(y[i]);

  std::vector<EncodedScheme> encoded;
  for (auto scheme : options.schemes) {
    EncodedScheme e{scheme, std::nullopt, {}, {}, {}};
    try {
      auto fitted = features::fit_transform(train_table, scheme, seed, options.text);
      e.test = features::transform(test_table, fitted.spec).values;
      e.train = std::move(fitted.matrix.values);
      e.encoder = std::move(fitted.spec);
    } catch (const Error& err) {
      e.error = err.what();
    }
    encoded.push_back(std::move(e));
  }

  const auto families = options.enabled_families();
  std::vector<Candidate> results;
  for (const auto& e : encoded)
    for (Family f : families) results.push_back({f, e.scheme, CandidateStatus::failed, std::nullopt, 0.0, {}});

  const auto run = [&](std::size_t index) {
    Candidate& c = results[index];
    const EncodedScheme& e = encoded[index / families.size()];
    if (!e.encoder) {
      c.message = "feature encoding failed: " + e.error;
      return;
    }
    const std::uint64_t cseed =
        util::mix_seed(seed, static_cast<std::uint64_t>(c.family) * 16 + static_cast<std::uint64_t>(c.scheme));
    const BudgetGuard guard(options.budget_for(c.family, budget));
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto spec = default_algorithm(c.family);
      auto strategy =
          options.strategy ? options.strategy(c.family) : std::make_unique<RandomSearch>(std::max<std::size_t>(1, options.n_trials));
      const auto tuned = tune(spec, e.train, y_train, classes.size(), *strategy, guard, cseed);
      auto classifier = make_classifier(c.family, tuned.best);
      classifier->fit(e.train, y_train, classes.size(), guard, cseed);
      const double train_time = seconds_since(start);

      TrainedModel model;
      model.family = c.family;
      model.hyperparameters = tuned.best;
      model.encoder = *e.encoder;
      model.classes = classes;
      model.classifier = std::move(classifier);
      model.requirement_key = request.requirement_key;
      model.dataset_fingerprint = request.dataset_fingerprint;
      const auto prediction = model.predict(e.test);
      std::vector<std::string> actual;
      for (int v : y_test) actual.push_back(classes[static_cast<std::size_t>(v)]);
      model.eval = evaluation::metrics(evaluation::confusion(std::span<const std::string>(actual),
                                                             std::span<const std::string>(prediction.labels)));
      model.timing = evaluation::TimingReport(train_time, prediction.seconds);
      c.model = std::move(model);
      c.status = CandidateStatus::fitted;
    } catch (const BudgetExceeded& ex) {
      c.status = CandidateStatus::timed_out;
      c.message = ex.what();
    } catch (const std::exception& ex) {
      c.status = CandidateStatus::failed;
      c.message = ex.what();
    }
    c.elapsed = seconds_since(start);
  };

  const std::size_t workers = std::clamp<std::size_t>(options.parallelism, 1, std::max<std::size_t>(1, results.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < results.size(); ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < results.size(); i = next++) run(i);
      });
    for (auto& t : pool) t.join();
  }
  return results;
}

std::optional<TrainedModel> select_optimal(std::span<const TrainedModel> models) {
  const TrainedModel* best = nullptr;
  for (const auto& m : models) {
    if (!best) {
      best = &m;
      continue;
    }
    const auto key = [](const TrainedModel& x) {
      return std::make_tuple(-x.eval.f1, x.timing.computation_time(), static_cast<int>(x.family),
                             static_cast<int>(x.scheme()));
    };
    if (key(m) < key(*best)) best = &m;
  }
  if (!best) return std::nullopt;
  return *best;
}

std::optional<TrainedModel> select_optimal(std::span<const Candidate> candidates) {
  std::vector<TrainedModel> fitted;
  for (const auto& c : candidates)
    if (c.status == CandidateStatus::fitted && c.model) fitted.push_back(*c.model);
  return select_optimal(std::span<const TrainedModel>(fitted));
}

}  // namespace ctiv::learners
