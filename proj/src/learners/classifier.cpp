#include "ctiv/learners/classifier.hpp"

#include <cmath>

#include "ctiv/errors.hpp"

namespace ctiv::learners {

namespace {

double get(const Hyperparams& p, const char* key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

std::size_t get_count(const Hyperparams& p, const char* key, double fallback) {
  const double v = get(p, key, fallback);
  if (!(v >= 0.0) || !std::isfinite(v))
    throw ConfigError(std::string("hyperparameter ") + key + " must be a non-negative count");
  return static_cast<std::size_t>(std::llround(v));
}

std::size_t get_at_least_one(const Hyperparams& p, const char* key, double fallback) {
  const std::size_t v = get_count(p, key, fallback);
  if (v < 1) throw ConfigError(std::string("hyperparameter ") + key + " must be at least 1");
  return v;
}

double get_non_negative(const Hyperparams& p, const char* key, double fallback) {
  const double v = get(p, key, fallback);
  if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string("hyperparameter ") + key + " must be non-negative");
  return v;
}

double get_positive(const Hyperparams& p, const char* key, double fallback) {
  const double v = get(p, key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("hyperparameter ") + key + " must be positive");
  return v;
}

}  // namespace

std::size_t Classifier::memory_estimate(std::size_t rows, std::size_t cols, std::size_t n_classes) const {
  return rows * (cols + n_classes) * sizeof(double) * 2;
}

void Classifier::check_width(const features::Matrix& x) const {
  if (x.cols() != n_features_)
    throw SpecMismatchError("feature width " + std::to_string(x.cols()) + " does not match the fitted width " +
                            std::to_string(n_features_));
}

std::unique_ptr<Classifier> make_classifier(Family family, const Hyperparams& p) {
  switch (family) {
    case Family::dt: {
      TreeOptions o;
      o.max_depth = static_cast<int>(get_count(p, "max_depth", 0));
      o.min_samples_leaf = get_at_least_one(p, "min_samples_leaf", 1);
      o.min_samples_split = std::max<std::size_t>(2, get_count(p, "min_samples_split", 2));
      return std::make_unique<DecisionTree>(o);
    }
    case Family::rf: {
      TreeOptions o;
      o.max_depth = static_cast<int>(get_count(p, "max_depth", 0));
      o.min_samples_leaf = get_at_least_one(p, "min_samples_leaf", 1);
      o.max_features = get_count(p, "max_features", 0);
      return std::make_unique<RandomForest>(get_at_least_one(p, "n_trees", 100), o);
    }
    case Family::knn:
      return std::make_unique<Knn>(get_at_least_one(p, "k", 5));
    case Family::gbay:
      return std::make_unique<GaussianBayes>(get_non_negative(p, "var_smoothing", 1e-9));
    case Family::rid:
      return std::make_unique<RidgeClassifier>(get_positive(p, "alpha", 1.0));
    case Family::svm_linear:
      return std::make_unique<LinearSvm>(get_positive(p, "lambda", 1e-3),
                                         get_at_least_one(p, "epochs", 10));
    case Family::mlp: {
      Mlp::Options o;
      o.hidden = get_at_least_one(p, "hidden", 16);
      o.learning_rate = get_positive(p, "learning_rate", 0.01);
      o.epochs = get_at_least_one(p, "epochs", 40);
      o.l2 = get_non_negative(p, "l2", 1e-4);
      o.batch_size = get_at_least_one(p, "batch_size", 64);
      return std::make_unique<Mlp>(o);
    }
    case Family::xgb: {
      BoostedTrees::Options o;
      o.n_rounds = get_at_least_one(p, "n_rounds", 20);
      o.max_depth = static_cast<int>(get_count(p, "max_depth", 3));
      o.eta = get_positive(p, "eta", 0.3);
      o.lambda = get_non_negative(p, "lambda", 1.0);
      return std::make_unique<BoostedTrees>(o);
    }
  }
  throw ConfigError("unknown family");
}

}  // namespace ctiv::learners
