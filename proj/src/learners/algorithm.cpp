#include "ctiv/learners/algorithm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "ctiv/errors.hpp"

namespace ctiv::learners {

namespace {

constexpr std::array<Family, 8> kFamilies = {Family::dt,  Family::rf,         Family::knn, Family::gbay,
                                             Family::rid, Family::svm_linear, Family::mlp, Family::xgb};

double param(const Hyperparams& p, const char* key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

}  // namespace

std::string_view family_name(Family family) {
  switch (family) {
    case Family::dt: return "DT";
    case Family::rf: return "RF";
    case Family::knn: return "KNN";
    case Family::gbay: return "GBAY";
    case Family::rid: return "RID";
    case Family::svm_linear: return "SVM";
    case Family::mlp: return "MLP";
    case Family::xgb: return "XGB";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Family f : kFamilies)
    if (family_name(f) == upper) return f;
  if (upper == "SVM-LINEAR" || upper == "SVM_LINEAR") return Family::svm_linear;
  if (upper == "XGB-LIKE" || upper == "XGB_LIKE") return Family::xgb;
  if (upper == "BAY" || upper == "NB") return Family::gbay;
  throw ConfigError("unknown algorithm family '" + std::string(name) + "'");
}

Tier family_tier(Family family) {
  switch (family) {
    case Family::svm_linear:
    case Family::mlp:
    case Family::xgb:
      return Tier::optional;
    default:
      return Tier::required;
  }
}

std::span<const Family> all_families() { return kFamilies; }

std::vector<Family> families_in(std::span<const Tier> tiers) {
  std::vector<Family> out;
  for (Family f : kFamilies) {
    if (std::find(tiers.begin(), tiers.end(), family_tier(f)) != tiers.end()) out.push_back(f);
  }
  return out;
}

std::size_t AlgorithmSpec::grid_size() const {
  std::size_t n = 1;
  for (const auto& [name, values] : grid) n *= values.size();
  return grid.empty() ? 1 : n;
}

Hyperparams AlgorithmSpec::grid_point(std::size_t index) const {
  if (index >= grid_size()) throw ContractError("grid index out of range");
  Hyperparams out;
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    const auto& values = it->second;
    out[it->first] = values[index % values.size()];
    index /= values.size();
  }
  return out;
}

AlgorithmSpec default_algorithm(Family family) {
  AlgorithmSpec spec{family, {}, family_tier(family)};
  switch (family) {
    case Family::dt:
      spec.grid = {{"max_depth", {4, 8, 16, 0}}, {"min_samples_leaf", {1, 3}}};
      break;
    case Family::rf:
      spec.grid = {{"n_trees", {50, 100}}, {"max_depth", {0, 16}}};
      break;
    case Family::knn:
      spec.grid = {{"k", {1, 3, 5, 11, 25}}};
      break;
    case Family::gbay:
      spec.grid = {{"var_smoothing", {1e-9, 1e-6, 1e-3}}};
      break;
    case Family::rid:
      spec.grid = {{"alpha", {0.01, 0.1, 1.0, 10.0}}};
      break;
    case Family::svm_linear:
      spec.grid = {{"lambda", {1e-4, 1e-3, 1e-2}}, {"epochs", {10, 30}}};
      break;
    case Family::mlp:
      spec.grid = {{"hidden", {16, 32}}, {"learning_rate", {0.01, 0.003}}, {"epochs", {40, 120}},
                   {"l2", {1e-4}}};
      break;
    case Family::xgb:
      spec.grid = {{"n_rounds", {20, 50}}, {"max_depth", {3, 6}}, {"eta", {0.3, 0.1}}, {"lambda", {1.0}}};
      break;
  }
  return spec;
}

double cost_hint(Family family, const Hyperparams& p) {
  const auto depth = [&](double fallback) {
    const double d = param(p, "max_depth", fallback);
    return d <= 0 ? 64.0 : d;
  };
  switch (family) {
    case Family::dt: return depth(0);
    case Family::rf: return param(p, "n_trees", 100) * depth(0);
    case Family::knn: return param(p, "k", 1);
    case Family::gbay: return 1.0;
    case Family::rid: return 1.0;
    case Family::svm_linear: return param(p, "epochs", 10);
    case Family::mlp: return param(p, "hidden", 16) * param(p, "epochs", 40);
    case Family::xgb: return param(p, "n_rounds", 20) * depth(3);
  }
  return 1.0;
}

std::string describe(const Hyperparams& params) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [k, v] : params) {
    if (!first) out << ',';
    first = false;
    out << k << '=' << v;
  }
  return out.str();
}

}  // namespace ctiv::learners
