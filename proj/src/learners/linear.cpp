#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "ctiv/errors.hpp"
#include "ctiv/learners/classifier.hpp"
#include "ctiv/util/random.hpp"

namespace ctiv::learners {

using nlohmann::json;

namespace {

void require_training_data(const features::Matrix& x, std::span<const int> y, std::size_t n_classes) {
  if (x.rows() == 0) throw InsufficientDataError("cannot fit on an empty training set");
  if (y.size() != x.rows()) throw ContractError("label count does not match row count");
  for (int v : y)
    if (v < 0 || static_cast<std::size_t>(v) >= n_classes) throw ContractError("class code out of range");
}

}  // namespace

std::vector<double> LinearModel::decision_function(const features::Matrix& x) const {
  if (x.cols() != n_features)
    throw SpecMismatchError("feature width " + std::to_string(x.cols()) + " does not match the fitted width " +
                            std::to_string(n_features));
  std::vector<double> out(x.rows() * n_classes);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t k = 0; k < n_classes; ++k) {
      double s = bias[k];
      const double* w = &weights[k * n_features];
      for (std::size_t j = 0; j < n_features; ++j)
        if (row[j] != 0.0) s += w[j] * row[j];
      out[r * n_classes + k] = s;
    }
  }
  return out;
}

std::vector<int> LinearModel::predict(const features::Matrix& x) const {
  const auto scores = decision_function(x);
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < n_classes; ++k)
      if (scores[r * n_classes + k] > scores[r * n_classes + best]) best = k;
    out[r] = static_cast<int>(best);
  }
  return out;
}

json LinearModel::to_json() const {
  return {{"n_features", n_features}, {"n_classes", n_classes}, {"weights", weights}, {"bias", bias}};
}

LinearModel LinearModel::from_json(const json& doc) {
  LinearModel m;
  m.n_features = doc.at("n_features").get<std::size_t>();
  m.n_classes = doc.at("n_classes").get<std::size_t>();
  m.weights = doc.at("weights").get<std::vector<double>>();
  m.bias = doc.at("bias").get<std::vector<double>>();
  if (m.weights.size() != m.n_features * m.n_classes || m.bias.size() != m.n_classes)
    throw FormatError("inconsistent linear model");
  return m;
}

// ---- RidgeClassifier -------------------------------------------------------

void RidgeClassifier::fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes,
                          const BudgetGuard& guard, std::uint64_t) {
  require_training_data(x, y, n_classes);
  guard.reserve(memory_estimate(x.rows(), x.cols(), n_classes));
  set_shape(x.cols(), n_classes);
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto d = static_cast<Eigen::Index>(x.cols());

  // Column d is the intercept.
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto row = x.row(static_cast<std::size_t>(r));
    for (Eigen::Index j = 0; j < d; ++j)
      if (row[static_cast<std::size_t>(j)] != 0.0) triplets.emplace_back(r, j, row[static_cast<std::size_t>(j)]);
    triplets.emplace_back(r, d, 1.0);
  }
  Eigen::SparseMatrix<double> xs(n, d + 1);
  xs.setFromTriplets(triplets.begin(), triplets.end());
  guard.check();

  Eigen::SparseMatrix<double> gram = (xs.transpose() * xs).pruned();
  Eigen::SparseMatrix<double> penalty(d + 1, d + 1);
  std::vector<Eigen::Triplet<double>> diag;
  for (Eigen::Index j = 0; j < d; ++j) diag.emplace_back(j, j, alpha_);
  penalty.setFromTriplets(diag.begin(), diag.end());
  gram += penalty;

  const auto k_count = static_cast<Eigen::Index>(n_classes);
  Eigen::MatrixXd targets = Eigen::MatrixXd::Constant(n, k_count, -1.0);
  for (Eigen::Index r = 0; r < n; ++r) targets(r, y[static_cast<std::size_t>(r)]) = 1.0;
  const Eigen::MatrixXd rhs = xs.transpose() * targets;
  guard.check();

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(gram);
  if (solver.info() != Eigen::Success) throw ContractError("ridge system could not be factorized");
  const Eigen::MatrixXd coef = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw ContractError("ridge system could not be solved");

  model_.n_features = x.cols();
  model_.n_classes = n_classes;
  model_.weights.assign(n_classes * x.cols(), 0.0);
  model_.bias.assign(n_classes, 0.0);
  for (Eigen::Index k = 0; k < k_count; ++k) {
    for (Eigen::Index j = 0; j < d; ++j)
      model_.weights[static_cast<std::size_t>(k * d + j)] = coef(j, k);
    model_.bias[static_cast<std::size_t>(k)] = coef(d, k);
  }
}

std::vector<int> RidgeClassifier::predict(const features::Matrix& x) const {
  check_width(x);
  return model_.predict(x);
}

json RidgeClassifier::save() const { return model_.to_json(); }

void RidgeClassifier::load(const json& doc) {
  model_ = LinearModel::from_json(doc);
  set_shape(model_.n_features, model_.n_classes);
}

// ---- LinearSvm -------------------------------------------------------------

void LinearSvm::fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes,
                    const BudgetGuard& guard, std::uint64_t seed) {
  require_training_data(x, y, n_classes);
  guard.reserve(memory_estimate(x.rows(), x.cols(), n_classes));
  set_shape(x.cols(), n_classes);
  const std::size_t n = x.rows(), d = x.cols();
  const auto csr = features::CsrMatrix::from_dense(x);

  // w_k = scale_k * v_k keeps the shrink step O(1) on sparse rows.
  std::vector<double> v(n_classes * d, 0.0), scale(n_classes, 1.0), bias(n_classes, 0.0);
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  util::Rng rng(seed);
  double t = 0.0;
  for (std::size_t epoch = 0; epoch < epochs_; ++epoch) {
    guard.check();
    util::shuffle(std::span<std::uint32_t>(order), rng);
    for (auto r : order) {
      t += 1.0;
      const double eta = 1.0 / (1.0 + lambda_ * t);
      for (std::size_t k = 0; k < n_classes; ++k) {
        const double target = static_cast<std::size_t>(y[r]) == k ? 1.0 : -1.0;
        double* vk = &v[k * d];
        double dot = 0.0;
        for (std::size_t p = csr.indptr[r]; p < csr.indptr[r + 1]; ++p) dot += vk[csr.indices[p]] * csr.values[p];
        const double margin = target * (scale[k] * dot + bias[k]);
        scale[k] *= 1.0 - eta * lambda_;
        if (margin < 1.0) {
          const double step = eta * target / scale[k];
          for (std::size_t p = csr.indptr[r]; p < csr.indptr[r + 1]; ++p) vk[csr.indices[p]] += step * csr.values[p];
          bias[k] += eta * target;
        }
        if (scale[k] < 1e-9) {
          for (std::size_t j = 0; j < d; ++j) vk[j] *= scale[k];
          scale[k] = 1.0;
        }
      }
    }
  }
  model_.n_features = d;
  model_.n_classes = n_classes;
  model_.weights.assign(n_classes * d, 0.0);
  model_.bias = bias;
  for (std::size_t k = 0; k < n_classes; ++k)
    for (std::size_t j = 0; j < d; ++j) model_.weights[k * d + j] = scale[k] * v[k * d + j];
}

std::vector<int> LinearSvm::predict(const features::Matrix& x) const {
  check_width(x);
  return model_.predict(x);
}

json LinearSvm::save() const { return model_.to_json(); }

void LinearSvm::load(const json& doc) {
  model_ = LinearModel::from_json(doc);
  set_shape(model_.n_features, model_.n_classes);
}

}  // namespace ctiv::learners
