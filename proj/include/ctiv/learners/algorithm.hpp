#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ctiv::learners {

// Classifier families. Declaration order is the fixed family order used as
// the last tie-break in model selection.
enum class Family { dt, rf, knn, gbay, rid, svm_linear, mlp, xgb };

enum class Tier { required, optional };

std::string_view family_name(Family family);
Family parse_family(std::string_view name);
Tier family_tier(Family family);
std::span<const Family> all_families();
std::vector<Family> families_in(std::span<const Tier> tiers);

using Hyperparams = std::map<std::string, double>;

// Named hyperparameter ranges; the grid is their cartesian product,
// enumerated with the last range varying fastest.
struct AlgorithmSpec {
  Family family = Family::dt;
  std::vector<std::pair<std::string, std::vector<double>>> grid;
  Tier tier = Tier::required;

  std::size_t grid_size() const;
  Hyperparams grid_point(std::size_t index) const;
};

// Default search space per family.
AlgorithmSpec default_algorithm(Family family);

// Relative training cost implied by the hyperparameters alone (tree
// counts, depth, epochs, ...). Deterministic, used to break F1 ties in
// tuning without consulting the wall clock.
double cost_hint(Family family, const Hyperparams& params);

std::string describe(const Hyperparams& params);

}  // namespace ctiv::learners
