#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctiv/errors.hpp"
#include "ctiv/learners/classifier.hpp"
#include "tree_builder.hpp"

namespace ctiv::learners {

using nlohmann::json;

namespace {

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

void require_training_data(const features::Matrix& x, std::span<const int> y, std::size_t n_classes) {
  if (x.rows() == 0) throw InsufficientDataError("cannot fit on an empty training set");
  if (y.size() != x.rows()) throw ContractError("label count does not match row count");
  if (n_classes == 0) throw ContractError("n_classes must be positive");
  for (int v : y)
    if (v < 0 || static_cast<std::size_t>(v) >= n_classes) throw ContractError("class code out of range");
}

json tree_to_json(const Tree& tree) {
  json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
       value = json::array();
  for (const auto& n : tree.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

Tree tree_from_json(const json& doc) {
  Tree tree;
  const auto& feature = doc.at("feature");
  tree.nodes.resize(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i) {
    auto& n = tree.nodes[i];
    n.feature = feature[i].get<int>();
    n.threshold = doc.at("threshold")[i].get<double>();
    n.left = doc.at("left")[i].get<int>();
    n.right = doc.at("right")[i].get<int>();
    n.value = doc.at("value")[i].get<std::vector<double>>();
    const int limit = static_cast<int>(feature.size());
    if (n.feature >= 0 && (n.left <= static_cast<int>(i) || n.right <= static_cast<int>(i) || n.left >= limit ||
                           n.right >= limit))
      throw FormatError("malformed tree node");
  }
  if (tree.nodes.empty()) throw FormatError("tree without nodes");
  return tree;
}

std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0u);
  return rows;
}

}  // namespace

const TreeNode& Tree::leaf_for(std::span<const double> row) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i];
}

std::size_t Tree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  // Children always follow their parent.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

// ---- DecisionTree ----------------------------------------------------------

void DecisionTree::fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes,
                       const BudgetGuard& guard, std::uint64_t seed) {
  require_training_data(x, y, n_classes);
  guard.reserve(memory_estimate(x.rows(), x.cols(), n_classes));
  set_shape(x.cols(), n_classes);
  const auto csc = features::CscMatrix::from_dense(x);
  const std::vector<double> weight(x.rows(), 1.0);
  detail::GiniPolicy policy{y, weight, n_classes, std::max<std::size_t>(1, options_.min_samples_leaf)};
  util::Rng rng(seed);
  detail::TreeBuilder<detail::GiniPolicy> builder(x, csc, policy, options_, guard, &rng);
  tree_ = builder.build(all_rows(x.rows()));
}

std::vector<int> DecisionTree::predict(const features::Matrix& x) const {
  check_width(x);
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) out[r] = static_cast<int>(argmax(tree_.leaf_for(x.row(r)).value));
  return out;
}

json DecisionTree::save() const {
  return {{"n_features", n_features()}, {"n_classes", n_classes()}, {"tree", tree_to_json(tree_)}};
}

void DecisionTree::load(const json& doc) {
  set_shape(doc.at("n_features").get<std::size_t>(), doc.at("n_classes").get<std::size_t>());
  tree_ = tree_from_json(doc.at("tree"));
}

// ---- RandomForest ----------------------------------------------------------

std::size_t RandomForest::memory_estimate(std::size_t rows, std::size_t cols, std::size_t n_classes) const {
  return Classifier::memory_estimate(rows, cols, n_classes) + n_trees_ * rows * (n_classes + 4) * sizeof(double);
}

void RandomForest::fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes,
                       const BudgetGuard& guard, std::uint64_t seed) {
  require_training_data(x, y, n_classes);
  guard.reserve(memory_estimate(x.rows(), x.cols(), n_classes));
  set_shape(x.cols(), n_classes);
  const auto csc = features::CscMatrix::from_dense(x);
  TreeOptions opts = options_;
  if (opts.max_features == 0)
    opts.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(x.cols()))));

  util::Rng rng(seed);
  std::vector<double> weight(x.rows());
  trees_.clear();
  trees_.reserve(n_trees_);
  for (std::size_t t = 0; t < n_trees_; ++t) {
    guard.check();
    std::fill(weight.begin(), weight.end(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) weight[util::uniform_index(rng, x.rows())] += 1.0;
    std::vector<std::uint32_t> rows;
    for (std::uint32_t r = 0; r < x.rows(); ++r)
      if (weight[r] > 0.0) rows.push_back(r);
    detail::GiniPolicy policy{y, weight, n_classes, std::max<std::size_t>(1, opts.min_samples_leaf)};
    util::Rng tree_rng(util::mix_seed(seed, t));
    detail::TreeBuilder<detail::GiniPolicy> builder(x, csc, policy, opts, guard, &tree_rng);
    trees_.push_back(builder.build(std::move(rows)));
  }
}

std::vector<int> RandomForest::predict(const features::Matrix& x) const {
  check_width(x);
  std::vector<int> out(x.rows());
  std::vector<double> acc(n_classes());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (const auto& tree : trees_) {
      const auto& v = tree.leaf_for(x.row(r)).value;
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += v[k];
    }
    out[r] = static_cast<int>(argmax(acc));
  }
  return out;
}

json RandomForest::save() const {
  json trees = json::array();
  for (const auto& t : trees_) trees.push_back(tree_to_json(t));
  return {{"n_features", n_features()}, {"n_classes", n_classes()}, {"trees", std::move(trees)}};
}

void RandomForest::load(const json& doc) {
  set_shape(doc.at("n_features").get<std::size_t>(), doc.at("n_classes").get<std::size_t>());
  trees_.clear();
  for (const auto& t : doc.at("trees")) trees_.push_back(tree_from_json(t));
  n_trees_ = trees_.size();
}

// ---- BoostedTrees ----------------------------------------------------------

void BoostedTrees::fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes,
                       const BudgetGuard& guard, std::uint64_t seed) {
  require_training_data(x, y, n_classes);
  guard.reserve(memory_estimate(x.rows(), x.cols(), n_classes) + x.rows() * n_classes * 3 * sizeof(double));
  set_shape(x.cols(), n_classes);
  const std::size_t n = x.rows(), k_count = n_classes;

  std::vector<double> prior(k_count, 0.0);
  for (int v : y) prior[static_cast<std::size_t>(v)] += 1.0;
  base_score_.assign(k_count, 0.0);
  for (std::size_t k = 0; k < k_count; ++k) base_score_[k] = std::log(std::max(prior[k], 0.5) / static_cast<double>(n));
  rounds_.clear();
  if (k_count < 2) return;

  const auto csc = features::CscMatrix::from_dense(x);
  std::vector<double> margin(n * k_count);
  for (std::size_t r = 0; r < n; ++r)
    std::copy(base_score_.begin(), base_score_.end(), margin.begin() + static_cast<std::ptrdiff_t>(r * k_count));
  std::vector<double> prob(n * k_count), grad(n), hess(n);
  TreeOptions opts;
  opts.max_depth = options_.max_depth;
  opts.min_samples_split = 2;
  opts.min_samples_leaf = 1;
  util::Rng rng(seed);

  for (std::size_t round = 0; round < options_.n_rounds; ++round) {
    guard.check();
    for (std::size_t r = 0; r < n; ++r) {
      const double* m = &margin[r * k_count];
      const double mx = *std::max_element(m, m + k_count);
      double z = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) z += std::exp(m[k] - mx);
      for (std::size_t k = 0; k < k_count; ++k) prob[r * k_count + k] = std::exp(m[k] - mx) / z;
    }
    std::vector<Tree> trees;
    for (std::size_t k = 0; k < k_count; ++k) {
      for (std::size_t r = 0; r < n; ++r) {
        const double p = prob[r * k_count + k];
        grad[r] = p - (static_cast<std::size_t>(y[r]) == k ? 1.0 : 0.0);
        hess[r] = std::max(p * (1.0 - p), 1e-6);
      }
      detail::NewtonPolicy policy{grad, hess, options_.lambda, options_.min_child_weight, 1};
      detail::TreeBuilder<detail::NewtonPolicy> builder(x, csc, policy, opts, guard, &rng);
      Tree tree = builder.build(all_rows(n));
      for (auto& node : tree.nodes) node.value[0] *= options_.eta;
      for (std::size_t r = 0; r < n; ++r) margin[r * k_count + k] += tree.leaf_for(x.row(r)).value[0];
      trees.push_back(std::move(tree));
    }
    rounds_.push_back(std::move(trees));
  }
}

std::vector<double> BoostedTrees::margins(const features::Matrix& x) const {
  check_width(x);
  const std::size_t k_count = n_classes();
  std::vector<double> out(x.rows() * k_count);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t k = 0; k < k_count; ++k) {
      double m = base_score_[k];
      for (const auto& trees : rounds_) m += trees[k].leaf_for(x.row(r)).value[0];
      out[r * k_count + k] = m;
    }
  }
  return out;
}

std::vector<int> BoostedTrees::predict(const features::Matrix& x) const {
  const auto m = margins(x);
  const std::size_t k_count = n_classes();
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r)
    out[r] = static_cast<int>(argmax(std::span<const double>(m).subspan(r * k_count, k_count)));
  return out;
}

json BoostedTrees::save() const {
  json rounds = json::array();
  for (const auto& trees : rounds_) {
    json per_class = json::array();
    for (const auto& t : trees) per_class.push_back(tree_to_json(t));
    rounds.push_back(std::move(per_class));
  }
  return {{"n_features", n_features()}, {"n_classes", n_classes()}, {"base_score", base_score_},
          {"rounds", std::move(rounds)}};
}

void BoostedTrees::load(const json& doc) {
  set_shape(doc.at("n_features").get<std::size_t>(), doc.at("n_classes").get<std::size_t>());
  base_score_ = doc.at("base_score").get<std::vector<double>>();
  if (base_score_.size() != n_classes()) throw FormatError("base score size mismatch");
  rounds_.clear();
  for (const auto& round : doc.at("rounds")) {
    std::vector<Tree> trees;
    for (const auto& t : round) trees.push_back(tree_from_json(t));
    if (trees.size() != n_classes()) throw FormatError("boosting round has the wrong tree count");
    rounds_.push_back(std::move(trees));
  }
}

}  // namespace ctiv::learners
