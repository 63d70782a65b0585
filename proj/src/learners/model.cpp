#include "ctiv/learners/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "ctiv/errors.hpp"
#include "ctiv/features/encoder_json.hpp"

namespace ctiv::learners {

using nlohmann::json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double macro_f1(std::span<const int> actual, std::span<const int> predicted) {
  return evaluation::metrics(evaluation::confusion(actual, predicted)).f1;
}

}  // namespace

// ---- split -----------------------------------------------------------------

SplitIndices split(std::span<const int> labels, double test_fraction, std::uint64_t seed, Diagnostics* diagnostics) {
  const std::size_t n = labels.size();
  if (n < 2) throw InsufficientDataError("a split needs at least two rows");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ContractError("test fraction must lie in (0, 1)");
  const auto target = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n))), 1, n - 1);

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
  const bool stratify =
      std::all_of(by_class.begin(), by_class.end(), [](const auto& kv) { return kv.second.size() >= 2; });

  util::Rng rng(seed);
  SplitIndices out;
  out.stratified = stratify;
  if (stratify) {
    // Largest-remainder allocation of the test quota across classes.
    struct Share {
      int label;
      std::size_t take;
      double remainder;
    };
    std::vector<Share> shares;
    std::size_t assigned = 0;
    for (const auto& [label, members] : by_class) {
      const double quota = static_cast<double>(target) * static_cast<double>(members.size()) / static_cast<double>(n);
      const auto base = static_cast<std::size_t>(std::floor(quota));
      shares.push_back({label, base, quota - static_cast<double>(base)});
      assigned += base;
    }
    std::vector<std::size_t> order(shares.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return shares[a].remainder > shares[b].remainder; });
    for (std::size_t i = 0; assigned < target; i = (i + 1) % order.size()) {
      auto& s = shares[order[i]];
      if (s.take < by_class[s.label].size()) {
        ++s.take;
        ++assigned;
      }
    }
    for (const auto& s : shares) {
      auto members = by_class[s.label];
      util::shuffle(std::span<std::size_t>(members), rng);
      out.test.insert(out.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(s.take));
      out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(s.take), members.end());
    }
  } else {
    if (diagnostics) diagnostics->add("split", 0, "a class has fewer than two members; split is not stratified");
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    util::shuffle(std::span<std::size_t>(all), rng);
    out.test.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(target));
    out.train.assign(all.begin() + static_cast<std::ptrdiff_t>(target), all.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

// ---- train -----------------------------------------------------------------

TrainOutcome train(Family family, const Hyperparams& params, const features::Matrix& x, std::span<const int> y,
                   std::size_t n_classes, const BuildBudget& budget, std::uint64_t seed) {
  TrainOutcome out;
  const BudgetGuard guard(budget);
  const auto start = std::chrono::steady_clock::now();
  auto classifier = make_classifier(family, params);
  try {
    classifier->fit(x, y, n_classes, guard, seed);
    out.classifier = std::move(classifier);
  } catch (const BudgetExceeded& e) {
    out.timed_out = true;
    out.reason = e.what();
  }
  out.train_time = seconds_since(start);
  return out;
}

// ---- tune ------------------------------------------------------------------

std::optional<Hyperparams> RandomSearch::next(const AlgorithmSpec& spec, std::span<const TrialResult> history,
                                              util::Rng& rng) {
  if (history.size() >= max_trials_) return std::nullopt;
  std::vector<std::size_t> untried;
  for (std::size_t i = 0; i < spec.grid_size(); ++i) {
    const auto point = spec.grid_point(i);
    const bool seen =
        std::any_of(history.begin(), history.end(), [&](const TrialResult& t) { return t.params == point; });
    if (!seen) untried.push_back(i);
  }
  if (untried.empty()) return std::nullopt;
  return spec.grid_point(untried[util::uniform_index(rng, untried.size())]);
}

TuneResult tune(const AlgorithmSpec& spec, const features::Matrix& x, std::span<const int> y, std::size_t n_classes,
                SearchStrategy& strategy, const BudgetGuard& guard, std::uint64_t seed, double validation_fraction) {
  for (const auto& [name, values] : spec.grid)
    for (double v : values)
      if (!std::isfinite(v)) throw ConfigError("hyperparameter grid value for " + name + " is not finite");

  util::Rng rng(util::mix_seed(seed, 0x7475));
  TuneResult result;
  // Too few rows for an inner holdout: take the first proposal untested.
  if (x.rows() < 4) {
    auto first = strategy.next(spec, {}, rng);
    if (!first) throw ConfigError("search strategy proposed no hyperparameters");
    result.best = *first;
    return result;
  }

  const auto inner = split(y, validation_fraction, util::mix_seed(seed, 0x7661));
  const auto x_fit = x.select_rows(inner.train);
  const auto x_val = x.select_rows(inner.test);
  std::vector<int> y_fit, y_val;
  for (auto i : inner.train) y_fit.push_back(y[i]);
  for (auto i : inner.test) y_val.push_back(y[i]);

  std::optional<std::size_t> best;
  while (auto params = strategy.next(spec, result.trials, rng)) {
    TrialResult trial{*params, 0.0, 0.0, false};
    const auto start = std::chrono::steady_clock::now();
    try {
      auto model = make_classifier(spec.family, *params);
      model->fit(x_fit, y_fit, n_classes, guard, seed);
      trial.f1 = macro_f1(y_val, model->predict(x_val));
    } catch (const BudgetExceeded&) {
      trial.timed_out = true;
    }
    trial.seconds = seconds_since(start);
    result.trials.push_back(trial);
    if (trial.timed_out) break;
    const std::size_t idx = result.trials.size() - 1;
    if (!best) {
      best = idx;
    } else {
      const auto& b = result.trials[*best];
      if (trial.f1 > b.f1 || (trial.f1 == b.f1 && cost_hint(spec.family, trial.params) <
                                                       cost_hint(spec.family, b.params)))
        best = idx;
    }
  }
  if (!best) {
    if (!result.trials.empty()) throw BudgetExceeded("every tuning trial timed out", guard.elapsed());
    throw ConfigError("search strategy proposed no hyperparameters");
  }
  result.best = result.trials[*best].params;
  result.best_f1 = result.trials[*best].f1;
  return result;
}

// ---- TrainedModel ----------------------------------------------------------

Prediction TrainedModel::predict(const features::Matrix& x) const {
  if (!classifier) throw ContractError("model has no fitted classifier");
  if (x.cols() != classifier->n_features())
    throw SpecMismatchError("matrix width " + std::to_string(x.cols()) + " does not match model width " +
                            std::to_string(classifier->n_features()));
  Prediction out;
  const auto start = std::chrono::steady_clock::now();
  if (x.rows() > 0) {
    const auto codes = classifier->predict(x);
    out.labels.reserve(codes.size());
    for (int c : codes) out.labels.push_back(classes.at(static_cast<std::size_t>(c)));
  }
  out.seconds = std::max(0.0, seconds_since(start));
  return out;
}

Prediction TrainedModel::predict(const ingest::Table& rows) const {
  return predict(features::transform(rows, encoder).values);
}

json model_to_json_value(const TrainedModel& model, bool include_timing) {
  json manifest = {{"family", std::string(family_name(model.family))},
                   {"hyperparameters", model.hyperparameters},
                   {"scheme", std::string(features::scheme_name(model.scheme()))},
                   {"label_map", model.classes},
                   {"eval", evaluation::report_to_json(model.eval)},
                   {"requirement_key", model.requirement_key},
                   {"dataset_fingerprint", model.dataset_fingerprint}};
  if (include_timing) manifest["timing"] = evaluation::timing_to_json(model.timing);
  return {{"format_version", TrainedModel::kFormatVersion},
          {"manifest", std::move(manifest)},
          {"encoder", features::encoder_to_json_value(model.encoder)},
          {"parameters", model.classifier ? model.classifier->save() : json()}};
}

std::string model_to_json(const TrainedModel& model, bool include_timing) {
  return model_to_json_value(model, include_timing).dump();
}

TrainedModel model_from_json_value(const json& doc) {
  if (!doc.is_object() || !doc.contains("format_version")) throw FormatError("not a model container");
  if (doc.at("format_version") != TrainedModel::kFormatVersion)
    throw FormatError("unsupported model format version " + doc.at("format_version").dump());
  try {
    const auto& m = doc.at("manifest");
    TrainedModel model;
    model.family = parse_family(m.at("family").get<std::string>());
    model.hyperparameters = m.at("hyperparameters").get<Hyperparams>();
    model.classes = m.at("label_map").get<std::vector<std::string>>();
    std::vector<std::string> sorted = model.classes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw FormatError("label map is not one-to-one");
    model.eval = evaluation::report_from_json(m.at("eval"));
    if (m.contains("timing")) model.timing = evaluation::timing_from_json(m.at("timing"));
    model.requirement_key = m.at("requirement_key").get<std::string>();
    model.dataset_fingerprint = m.at("dataset_fingerprint").get<std::string>();
    model.encoder = features::encoder_from_json_value(doc.at("encoder"));
    if (features::scheme_name(model.encoder.scheme) != m.at("scheme").get<std::string>())
      throw FormatError("manifest scheme disagrees with the encoder");
    auto classifier = make_classifier(model.family, model.hyperparameters);
    classifier->load(doc.at("parameters"));
    if (classifier->n_features() != model.encoder.width())
      throw FormatError("classifier width disagrees with the encoder width");
    if (classifier->n_classes() != model.classes.size()) throw FormatError("classifier class count disagrees");
    model.classifier = std::move(classifier);
    return model;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed model container: ") + e.what());
  }
}

TrainedModel model_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model container is not JSON: ") + e.what());
  }
  return model_from_json_value(doc);
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write model to " + path.string());
  out << model_to_json(model);
  if (!out) throw StorageError("failed writing model to " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot read model from " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace ctiv::learners
