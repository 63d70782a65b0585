#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctiv/errors.hpp"
#include "ctiv/learners/classifier.hpp"
#include "ctiv/util/random.hpp"

namespace ctiv::learners {

using nlohmann::json;

double& MlpParams::at(std::size_t i) {
  if (i < w1.size()) return w1[i];
  i -= w1.size();
  if (i < b1.size()) return b1[i];
  i -= b1.size();
  if (i < w2.size()) return w2[i];
  i -= w2.size();
  return b2.at(i);
}

double MlpParams::at(std::size_t i) const { return const_cast<MlpParams&>(*this).at(i); }

namespace {

MlpParams zeros_like(const MlpParams& p) {
  MlpParams g;
  g.inputs = p.inputs;
  g.hidden = p.hidden;
  g.outputs = p.outputs;
  g.w1.assign(p.w1.size(), 0.0);
  g.b1.assign(p.b1.size(), 0.0);
  g.w2.assign(p.w2.size(), 0.0);
  g.b2.assign(p.b2.size(), 0.0);
  return g;
}

void hidden_layer(const MlpParams& p, const features::CsrMatrix& x, std::size_t r, std::vector<double>& a) {
  const std::size_t h = p.hidden;
  std::copy(p.b1.begin(), p.b1.end(), a.begin());
  for (std::size_t q = x.indptr[r]; q < x.indptr[r + 1]; ++q) {
    const double v = x.values[q];
    const double* w = &p.w1[x.indices[q] * h];
    for (std::size_t j = 0; j < h; ++j) a[j] += v * w[j];
  }
  for (std::size_t j = 0; j < h; ++j) a[j] = std::tanh(a[j]);
}

void output_layer(const MlpParams& p, const std::vector<double>& a, std::vector<double>& prob) {
  const std::size_t h = p.hidden, c = p.outputs;
  std::copy(p.b2.begin(), p.b2.end(), prob.begin());
  for (std::size_t j = 0; j < h; ++j) {
    const double* w = &p.w2[j * c];
    for (std::size_t k = 0; k < c; ++k) prob[k] += a[j] * w[k];
  }
  const double mx = *std::max_element(prob.begin(), prob.end());
  double z = 0.0;
  for (double& v : prob) z += (v = std::exp(v - mx));
  for (double& v : prob) v /= z;
}

// Loss over `rows` and its gradient accumulated into `grad` (zeroed here).
double batch_gradient(const MlpParams& p, const features::CsrMatrix& x, std::span<const int> y,
                      std::span<const std::uint32_t> rows, double l2, MlpParams& grad) {
  const std::size_t h = p.hidden, c = p.outputs;
  std::fill(grad.w1.begin(), grad.w1.end(), 0.0);
  std::fill(grad.b1.begin(), grad.b1.end(), 0.0);
  std::fill(grad.w2.begin(), grad.w2.end(), 0.0);
  std::fill(grad.b2.begin(), grad.b2.end(), 0.0);
  std::vector<double> a(h), prob(c), delta_out(c), delta_hidden(h);
  const double inv = 1.0 / static_cast<double>(rows.size());
  double loss = 0.0;
  for (auto r : rows) {
    hidden_layer(p, x, r, a);
    output_layer(p, a, prob);
    const auto target = static_cast<std::size_t>(y[r]);
    loss -= std::log(std::max(prob[target], 1e-300));
    for (std::size_t k = 0; k < c; ++k) delta_out[k] = (prob[k] - (k == target ? 1.0 : 0.0)) * inv;
    for (std::size_t k = 0; k < c; ++k) grad.b2[k] += delta_out[k];
    for (std::size_t j = 0; j < h; ++j) {
      double s = 0.0;
      const double* w = &p.w2[j * c];
      double* gw = &grad.w2[j * c];
      for (std::size_t k = 0; k < c; ++k) {
        gw[k] += a[j] * delta_out[k];
        s += w[k] * delta_out[k];
      }
      delta_hidden[j] = s * (1.0 - a[j] * a[j]);
      grad.b1[j] += delta_hidden[j];
    }
    for (std::size_t q = x.indptr[r]; q < x.indptr[r + 1]; ++q) {
      const double v = x.values[q];
      double* gw = &grad.w1[x.indices[q] * h];
      for (std::size_t j = 0; j < h; ++j) gw[j] += v * delta_hidden[j];
    }
  }
  loss *= inv;
  double sq = 0.0;
  for (std::size_t i = 0; i < p.w1.size(); ++i) {
    sq += p.w1[i] * p.w1[i];
    grad.w1[i] += l2 * p.w1[i];
  }
  for (std::size_t i = 0; i < p.w2.size(); ++i) {
    sq += p.w2[i] * p.w2[i];
    grad.w2[i] += l2 * p.w2[i];
  }
  return loss + 0.5 * l2 * sq;
}

}  // namespace

std::pair<double, MlpParams> mlp_loss_and_gradient(const MlpParams& params, const features::Matrix& x,
                                                   std::span<const int> y, double l2) {
  if (x.cols() != params.inputs) throw SpecMismatchError("input width does not match the network");
  if (y.size() != x.rows() || x.rows() == 0) throw ContractError("label count does not match row count");
  const auto csr = features::CsrMatrix::from_dense(x);
  std::vector<std::uint32_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0u);
  MlpParams grad = zeros_like(params);
  const double loss = batch_gradient(params, csr, y, rows, l2, grad);
  return {loss, std::move(grad)};
}

void Mlp::fit(const features::Matrix& x, std::span<const int> y, std::size_t n_classes, const BudgetGuard& guard,
              std::uint64_t seed) {
  if (x.rows() == 0) throw InsufficientDataError("cannot fit on an empty training set");
  if (y.size() != x.rows()) throw ContractError("label count does not match row count");
  guard.reserve(memory_estimate(x.rows(), x.cols(), n_classes) + 4 * (x.cols() + n_classes) * options_.hidden * sizeof(double));
  set_shape(x.cols(), n_classes);
  const std::size_t d = x.cols(), h = options_.hidden, c = n_classes;

  util::Rng rng(seed);
  params_ = MlpParams{d, h, c, std::vector<double>(d * h), std::vector<double>(h, 0.0), std::vector<double>(h * c),
                      std::vector<double>(c, 0.0)};
  const double a1 = std::sqrt(6.0 / static_cast<double>(d + h));
  const double a2 = std::sqrt(6.0 / static_cast<double>(h + c));
  for (double& w : params_.w1) w = (2.0 * util::uniform01(rng) - 1.0) * a1;
  for (double& w : params_.w2) w = (2.0 * util::uniform01(rng) - 1.0) * a2;

  const auto csr = features::CsrMatrix::from_dense(x);
  MlpParams grad = zeros_like(params_), m = zeros_like(params_), v = zeros_like(params_);
  const std::size_t total = params_.size();
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<std::uint32_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0u);
  const std::size_t batch = std::min(options_.batch_size, order.size());
  double step = 0.0;
  for (std::size_t epoch = 0; epoch < options_.epochs; ++epoch) {
    guard.check();
    util::shuffle(std::span<std::uint32_t>(order), rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const auto rows = std::span<const std::uint32_t>(order).subspan(start, std::min(batch, order.size() - start));
      batch_gradient(params_, csr, y, rows, options_.l2, grad);
      step += 1.0;
      const double c1 = 1.0 - std::pow(beta1, step), c2 = 1.0 - std::pow(beta2, step);
      for (std::size_t i = 0; i < total; ++i) {
        const double g = grad.at(i);
        double& mi = m.at(i);
        double& vi = v.at(i);
        mi = beta1 * mi + (1.0 - beta1) * g;
        vi = beta2 * vi + (1.0 - beta2) * g * g;
        params_.at(i) -= options_.learning_rate * (mi / c1) / (std::sqrt(vi / c2) + eps);
      }
    }
  }
}

std::vector<int> Mlp::predict(const features::Matrix& x) const {
  check_width(x);
  const auto csr = features::CsrMatrix::from_dense(x);
  std::vector<double> a(params_.hidden), prob(params_.outputs);
  std::vector<int> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    hidden_layer(params_, csr, r, a);
    output_layer(params_, a, prob);
    out[r] = static_cast<int>(std::max_element(prob.begin(), prob.end()) - prob.begin());
  }
  return out;
}

json Mlp::save() const {
  return {{"n_features", n_features()}, {"n_classes", n_classes()}, {"hidden", params_.hidden},
          {"w1", params_.w1},           {"b1", params_.b1},         {"w2", params_.w2},
          {"b2", params_.b2}};
}

void Mlp::load(const json& doc) {
  set_shape(doc.at("n_features").get<std::size_t>(), doc.at("n_classes").get<std::size_t>());
  params_.inputs = n_features();
  params_.outputs = n_classes();
  params_.hidden = doc.at("hidden").get<std::size_t>();
  params_.w1 = doc.at("w1").get<std::vector<double>>();
  params_.b1 = doc.at("b1").get<std::vector<double>>();
  params_.w2 = doc.at("w2").get<std::vector<double>>();
  params_.b2 = doc.at("b2").get<std::vector<double>>();
  if (params_.w1.size() != params_.inputs * params_.hidden || params_.b1.size() != params_.hidden ||
      params_.w2.size() != params_.hidden * params_.outputs || params_.b2.size() != params_.outputs)
    throw FormatError("inconsistent MLP model");
}

}  // namespace ctiv::learners
