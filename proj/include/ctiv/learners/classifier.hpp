#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctiv/features/matrix.hpp"
#include "ctiv/learners/algorithm.hpp"
#include "ctiv/learners/budget.hpp"

namespace ctiv::learners {

// Labels are dense class codes 0..n_classes-1. Predictions break score
// ties toward the lowest class code unless a family documents otherwise.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual Family family() const = 0;
  virtual void fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes,
                   const BudgetGuard& guard, std::uint64_t seed) = 0;
  virtual std::vector<int> predict(const features::Matrix& x) const = 0;

  // Fitted parameters only; hyperparameters travel separately.
  virtual nlohmann::json save() const = 0;
  virtual void load(const nlohmann::json& doc) = 0;

  // Rough resident size of a fit, checked against the memory budget.
  virtual std::size_t memory_estimate(std::size_t rows, std::size_t cols, std::size_t n_classes) const;

  std::size_t n_features() const { return n_features_; }
  std::size_t n_classes() const { return n_classes_; }

 protected:
  void set_shape(std::size_t n_features, std::size_t n_classes) {
    n_features_ = n_features;
    n_classes_ = n_classes;
  }
  // Throws SpecMismatchError on a width mismatch.
  void check_width(const features::Matrix& x) const;

 private:
  std::size_t n_features_ = 0;
  std::size_t n_classes_ = 0;
};

std::unique_ptr<Classifier> make_classifier(Family family, const Hyperparams& params);

// ---- Trees ---------------------------------------------------------------

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // x[feature] <= threshold
  int right = -1;  // x[feature] > threshold
  std::vector<double> value;  // class distribution, or a single leaf score
};

struct Tree {
  std::vector<TreeNode> nodes;
  const TreeNode& leaf_for(std::span<const double> row) const;
  std::size_t depth() const;
};

struct TreeOptions {
  int max_depth = 0;  // 0: unlimited
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // features tried per split; 0: all
};

class DecisionTree : public Classifier {
 public:
  explicit DecisionTree(TreeOptions options = {}) : options_(options) {}
  Family family() const override { return Family::dt; }
  void fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes, const BudgetGuard& guard,
           std::uint64_t seed) override;
  std::vector<int> predict(const features::Matrix& x) const override;
  nlohmann::json save() const override;
  void load(const nlohmann::json& doc) override;

  const Tree& tree() const { return tree_; }

 private:
  TreeOptions options_;
  Tree tree_;
};

class RandomForest : public Classifier {
 public:
  RandomForest(std::size_t n_trees, TreeOptions options) : n_trees_(n_trees), options_(options) {}
  Family family() const override { return Family::rf; }
  void fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes, const BudgetGuard& guard,
           std::uint64_t seed) override;
  std::vector<int> predict(const features::Matrix& x) const override;
  nlohmann::json save() const override;
  void load(const nlohmann::json& doc) override;
  std::size_t memory_estimate(std::size_t rows, std::size_t cols, std::size_t n_classes) const override;

  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::size_t n_trees_;
  TreeOptions options_;
  std::vector<Tree> trees_;
};

// Multiclass gradient boosting on the softmax loss with second-order
// (Newton) leaf values -G/(H + lambda).
class BoostedTrees : public Classifier {
 public:
  struct Options {
    std::size_t n_rounds = 20;
    int max_depth = 3;
    double eta = 0.3;
    double lambda = 1.0;
    double min_child_weight = 1e-3;
  };
  explicit BoostedTrees(Options options) : options_(options) {}
  Family family() const override { return Family::xgb; }
  void fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes, const BudgetGuard& guard,
           std::uint64_t seed) override;
  std::vector<int> predict(const features::Matrix& x) const override;
  nlohmann::json save() const override;
  void load(const nlohmann::json& doc) override;

  // Raw per-class margins, row-major rows x n_classes.
  std::vector<double> margins(const features::Matrix& x) const;

 private:
  Options options_;
  std::vector<double> base_score_;
  std::vector<std::vector<Tree>> rounds_;  // rounds_[r][k]
};

// ---- Instance based / probabilistic ----------------------------------------

// Squared Euclidean distance. Neighbours are ranked by (distance, training
// index); a vote tie goes to the tied class whose nearest member ranks
// first.
class Knn : public Classifier {
 public:
  explicit Knn(std::size_t k) : k_(k) {}
  Family family() const override { return Family::knn; }
  void fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes, const BudgetGuard& guard,
           std::uint64_t seed) override;
  std::vector<int> predict(const features::Matrix& x) const override;
  nlohmann::json save() const override;
  void load(const nlohmann::json& doc) override;

 private:
  std::size_t k_;
  features::Matrix train_;
  std::vector<int> labels_;
};

// Gaussian naive Bayes: per-class feature means and variances, variances
// inflated by var_smoothing * max feature variance and floored at 1e-9.
class GaussianBayes : public Classifier {
 public:
  explicit GaussianBayes(double var_smoothing) : var_smoothing_(var_smoothing) {}
  Family family() const override { return Family::gbay; }
  void fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes, const BudgetGuard& guard,
           std::uint64_t seed) override;
  std::vector<int> predict(const features::Matrix& x) const override;
  nlohmann::json save() const override;
  void load(const nlohmann::json& doc) override;

  // Joint log-likelihood per class, row-major rows x n_classes.
  std::vector<double> log_likelihood(const features::Matrix& x) const;

  const std::vector<double>& means() const { return mean_; }
  const std::vector<double>& variances() const { return var_; }
  const std::vector<double>& log_priors() const { return log_prior_; }

 private:
  double var_smoothing_;
  std::vector<double> mean_;  // n_classes x n_features
  std::vector<double> var_;
  std::vector<double> log_prior_;
};

// ---- Linear ----------------------------------------------------------------

// One-vs-rest linear scores w_k . x + b_k; argmax decides.
struct LinearModel {
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  std::vector<double> weights;  // n_classes x n_features
  std::vector<double> bias;

  std::vector<double> decision_function(const features::Matrix& x) const;
  std::vector<int> predict(const features::Matrix& x) const;
  nlohmann::json to_json() const;
  static LinearModel from_json(const nlohmann::json& doc);
};

// Ridge regression on +-1 one-vs-rest targets; the intercept is not
// penalized.
class RidgeClassifier : public Classifier {
 public:
  explicit RidgeClassifier(double alpha) : alpha_(alpha) {}
  Family family() const override { return Family::rid; }
  void fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes, const BudgetGuard& guard,
           std::uint64_t seed) override;
  std::vector<int> predict(const features::Matrix& x) const override;
  nlohmann::json save() const override;
  void load(const nlohmann::json& doc) override;

  const LinearModel& model() const { return model_; }
  LinearModel& model() { return model_; }

 private:
  double alpha_;
  LinearModel model_;
};

// Hinge-loss linear SVM trained by stochastic subgradient descent with
// step 1 / (1 + lambda * t).
class LinearSvm : public Classifier {
 public:
  LinearSvm(double lambda, std::size_t epochs) : lambda_(lambda), epochs_(epochs) {}
  Family family() const override { return Family::svm_linear; }
  void fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes, const BudgetGuard& guard,
           std::uint64_t seed) override;
  std::vector<int> predict(const features::Matrix& x) const override;
  nlohmann::json save() const override;
  void load(const nlohmann::json& doc) override;

  const LinearModel& model() const { return model_; }

 private:
  double lambda_;
  std::size_t epochs_;
  LinearModel model_;
};

// ---- Neural ----------------------------------------------------------------

// One tanh hidden layer and a softmax output.
struct MlpParams {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::size_t outputs = 0;
  std::vector<double> w1;  // inputs x hidden
  std::vector<double> b1;
  std::vector<double> w2;  // hidden x outputs
  std::vector<double> b2;

  std::size_t size() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  // Flat views over all parameters in w1, b1, w2, b2 order.
  double& at(std::size_t i);
  double at(std::size_t i) const;
};

// Mean cross-entropy plus (l2 / 2) * |W|^2 over both weight matrices, and
// its gradient laid out like the parameters.
std::pair<double, MlpParams> mlp_loss_and_gradient(const MlpParams& params, const features::Matrix& x,
                                                   std::span<const int> y, double l2);

class Mlp : public Classifier {
 public:
  struct Options {
    std::size_t hidden = 16;
    double learning_rate = 0.01;
    std::size_t epochs = 40;
    double l2 = 1e-4;
    std::size_t batch_size = 64;
  };
  explicit Mlp(Options options) : options_(options) {}
  Family family() const override { return Family::mlp; }
  void fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes, const BudgetGuard& guard,
           std::uint64_t seed) override;
  std::vector<int> predict(const features::Matrix& x) const override;
  nlohmann::json save() const override;
  void load(const nlohmann::json& doc) override;

  const MlpParams& params() const { return params_; }

 private:
  Options options_;
  MlpParams params_;
};

}  // namespace ctiv::learners
