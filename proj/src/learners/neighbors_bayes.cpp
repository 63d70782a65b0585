#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ctiv/errors.hpp"
#include "ctiv/learners/classifier.hpp"

namespace ctiv::learners {

using nlohmann::json;

namespace {

void require_training_data(const features::Matrix& x, std::span<const int> y, std::size_t n_classes) {
  if (x.rows() == 0) throw InsufficientDataError("cannot fit on an empty training set");
  if (y.size() != x.rows()) throw ContractError("label count does not match row count");
  for (int v : y)
    if (v < 0 || static_cast<std::size_t>(v) >= n_classes) throw ContractError("class code out of range");
}

json sparse_to_json(const features::Matrix& m) {
  const auto csr = features::CsrMatrix::from_dense(m);
  return {{"rows", csr.rows}, {"cols", csr.cols}, {"indptr", csr.indptr}, {"indices", csr.indices},
          {"values", csr.values}};
}

features::Matrix sparse_from_json(const json& doc) {
  features::Matrix m(doc.at("rows").get<std::size_t>(), doc.at("cols").get<std::size_t>());
  const auto indptr = doc.at("indptr").get<std::vector<std::size_t>>();
  const auto indices = doc.at("indices").get<std::vector<std::uint32_t>>();
  const auto values = doc.at("values").get<std::vector<double>>();
  if (indptr.size() != m.rows() + 1 || indices.size() != values.size() || indptr.back() != values.size())
    throw FormatError("malformed sparse matrix");
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t p = indptr[r]; p < indptr[r + 1]; ++p) {
      if (indices[p] >= m.cols()) throw FormatError("sparse column index out of range");
      m(r, indices[p]) = values[p];
    }
  return m;
}

}  // namespace

// ---- Knn -------------------------------------------------------------------

void Knn::fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes, const BudgetGuard& guard,
              std::uint64_t) {
  require_training_data(x, y, n_classes);
  guard.reserve(memory_estimate(x.rows(), x.cols(), n_classes));
  set_shape(x.cols(), n_classes);
  train_ = x;
  labels_.assign(y.begin(), y.end());
  guard.check();
}

std::vector<int> Knn::predict(const features::Matrix& x) const {
  check_width(x);
  const std::size_t n = train_.rows();
  const std::size_t k = std::min(k_, n);
  // |a-b|^2 = |a|^2 + |b|^2 - 2 a.b, with a.b accumulated over an inverted
  // index of the training nonzeros.
  const auto index = features::CscMatrix::from_dense(train_);
  std::vector<double> norm(n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (double v : train_.row(r)) norm[r] += v * v;

  std::vector<double> dist(n);
  std::vector<std::uint32_t> order(n);
  std::vector<std::size_t> votes(n_classes());
  std::vector<std::size_t> first_rank(n_classes());
  std::vector<int> out(x.rows());
  for (std::size_t q = 0; q < x.rows(); ++q) {
    const auto row = x.row(q);
    double qn = 0.0;
    std::fill(dist.begin(), dist.end(), 0.0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double v = row[c];
      if (v == 0.0) continue;
      qn += v * v;
      for (std::size_t p = index.indptr[c]; p < index.indptr[c + 1]; ++p) dist[index.indices[p]] -= 2.0 * v * index.values[p];
    }
    for (std::size_t r = 0; r < n; ++r) dist[r] = std::max(0.0, dist[r] + qn + norm[r]);

    std::iota(order.begin(), order.end(), 0u);
    const auto closer = [&](std::uint32_t a, std::uint32_t b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); };
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);

    std::fill(votes.begin(), votes.end(), 0);
    std::fill(first_rank.begin(), first_rank.end(), std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < k; ++i) {
      const auto c = static_cast<std::size_t>(labels_[order[i]]);
      ++votes[c];
      first_rank[c] = std::min(first_rank[c], i);
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c)
      if (votes[c] > votes[best] || (votes[c] == votes[best] && first_rank[c] < first_rank[best])) best = c;
    out[q] = static_cast<int>(best);
  }
  return out;
}

json Knn::save() const {
  return {{"n_features", n_features()}, {"n_classes", n_classes()}, {"k", k_}, {"train", sparse_to_json(train_)},
          {"labels", labels_}};
}

void Knn::load(const json& doc) {
  set_shape(doc.at("n_features").get<std::size_t>(), doc.at("n_classes").get<std::size_t>());
  k_ = doc.at("k").get<std::size_t>();
  train_ = sparse_from_json(doc.at("train"));
  labels_ = doc.at("labels").get<std::vector<int>>();
  if (labels_.size() != train_.rows() || train_.cols() != n_features()) throw FormatError("inconsistent KNN model");
}

// ---- GaussianBayes ---------------------------------------------------------

void GaussianBayes::fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes,
                        const BudgetGuard& guard, std::uint64_t) {
  require_training_data(x, y, n_classes);
  guard.reserve(memory_estimate(x.rows(), x.cols(), n_classes));
  set_shape(x.cols(), n_classes);
  const std::size_t d = x.cols(), n = x.rows();

  std::vector<double> count(n_classes, 0.0);
  mean_.assign(n_classes * d, 0.0);
  var_.assign(n_classes * d, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto k = static_cast<std::size_t>(y[r]);
    count[k] += 1.0;
    const auto row = x.row(r);
    for (std::size_t j = 0; j < d; ++j) mean_[k * d + j] += row[j];
  }
  for (std::size_t k = 0; k < n_classes; ++k)
    if (count[k] > 0.0)
      for (std::size_t j = 0; j < d; ++j) mean_[k * d + j] /= count[k];
  guard.check();
  for (std::size_t r = 0; r < n; ++r) {
    const auto k = static_cast<std::size_t>(y[r]);
    const auto row = x.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = row[j] - mean_[k * d + j];
      var_[k * d + j] += diff * diff;
    }
  }
  guard.check();

  // Largest overall feature variance scales the smoothing term.
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double s = 0.0, s2 = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      s += x(r, j);
    }
    const double mu = s / static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) s2 += (x(r, j) - mu) * (x(r, j) - mu);
    max_var = std::max(max_var, s2 / static_cast<double>(n));
  }
  guard.check();
  const double epsilon = var_smoothing_ * max_var;

  log_prior_.assign(n_classes, 0.0);
  for (std::size_t k = 0; k < n_classes; ++k) {
    log_prior_[k] = count[k] > 0.0 ? std::log(count[k] / static_cast<double>(n)) : -1e300;
    for (std::size_t j = 0; j < d; ++j) {
      double& v = var_[k * d + j];
      v = count[k] > 0.0 ? v / count[k] : 1.0;
      v = std::max(v + epsilon, 1e-9);
    }
  }
}

std::vector<double> GaussianBayes::log_likelihood(const features::Matrix& x) const {
  check_width(x);
  const std::size_t d = n_features(), kc = n_classes();
  constexpr double kTwoPi = 6.283185307179586;
  // Contribution of an all-zero row, then per-nonzero corrections.
  std::vector<double> base(kc);
  for (std::size_t k = 0; k < kc; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double mu = mean_[k * d + j], v = var_[k * d + j];
      s += std::log(kTwoPi * v) + mu * mu / v;
    }
    base[k] = log_prior_[k] - 0.5 * s;
  }
  std::vector<double> out(x.rows() * kc);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    for (std::size_t k = 0; k < kc; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double xv = row[j];
        if (xv == 0.0) continue;
        const double mu = mean_[k * d + j], v = var_[k * d + j];
        s += ((xv - mu) * (xv - mu) - mu * mu) / v;
      }
      out[r * kc + k] = base[k] - 0.5 * s;
    }
  }
  return out;
}

std::vector<int> GaussianBayes::predict(const features::Matrix& x) const {
  const auto ll = log_likelihood(x);
  const std::size_t kc = n_classes();
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kc; ++k)
      if (ll[r * kc + k] > ll[r * kc + best]) best = k;
    out[r] = static_cast<int>(best);
  }
  return out;
}

json GaussianBayes::save() const {
  return {{"n_features", n_features()}, {"n_classes", n_classes()}, {"mean", mean_}, {"var", var_},
          {"log_prior", log_prior_}};
}

void GaussianBayes::load(const json& doc) {
  set_shape(doc.at("n_features").get<std::size_t>(), doc.at("n_classes").get<std::size_t>());
  mean_ = doc.at("mean").get<std::vector<double>>();
  var_ = doc.at("var").get<std::vector<double>>();
  log_prior_ = doc.at("log_prior").get<std::vector<double>>();
  if (mean_.size() != n_features() * n_classes() || var_.size() != mean_.size() || log_prior_.size() != n_classes())
    throw FormatError("inconsistent Gaussian Bayes model");
}

}  // namespace ctiv::learners
