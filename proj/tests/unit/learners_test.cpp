#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ctiv/errors.hpp"
#include "ctiv/learners/classifier.hpp"
#include "ctiv/learners/model.hpp"
#include "ctiv/util/random.hpp"
#include "oracles.hpp"

namespace ctiv::learners {

void PrintTo(Family f, std::ostream* os) { *os << family_name(f); }

namespace {

using features::Matrix;

struct Data {
  Matrix x;
  std::vector<int> y;
  std::size_t k = 0;
};

// Gaussian blobs around well separated class centres.
Data blobs(std::size_t rows, std::size_t cols, std::size_t classes, double spread, std::uint64_t seed) {
  util::Rng rng(seed);
  std::vector<double> centres(classes * cols);
  for (auto& c : centres) c = 6.0 * util::standard_normal(rng);
  Data d{Matrix(rows, cols), std::vector<int>(rows), classes};
  for (std::size_t r = 0; r < rows; ++r) {
    const auto k = util::uniform_index(rng, classes);
    d.y[r] = static_cast<int>(k);
    for (std::size_t c = 0; c < cols; ++c) d.x(r, c) = centres[k * cols + c] + spread * util::standard_normal(rng);
  }
  return d;
}

// Small integer grid so distance ties are common.
Data integer_points(std::size_t rows, std::size_t cols, std::size_t classes, std::uint64_t seed) {
  util::Rng rng(seed);
  Data d{Matrix(rows, cols), std::vector<int>(rows), classes};
  for (std::size_t r = 0; r < rows; ++r) {
    d.y[r] = static_cast<int>(util::uniform_index(rng, classes));
    for (std::size_t c = 0; c < cols; ++c) d.x(r, c) = static_cast<double>(util::uniform_index(rng, 4));
  }
  return d;
}

double accuracy(const std::vector<int>& a, std::span<const int> b) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ok += a[i] == b[i];
  return static_cast<double>(ok) / static_cast<double>(a.size());
}

const BudgetGuard kNoLimit{};

// ---- KNN -------------------------------------------------------------------

TEST(Knn, MatchesExhaustiveSearch) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto train = integer_points(20 + seed * 15, 3, 3, seed);
    const auto query = integer_points(60, 3, 3, seed + 100);
    for (std::size_t k : {1, 2, 3, 4, 7, 500}) {
      Knn knn(k);
      knn.fit(train.x, train.y, train.k, kNoLimit, 0);
      EXPECT_EQ(knn.predict(query.x), testing::knn_oracle(train.x, train.y, train.k, query.x, k)) << "seed " << seed << " k " << k;
    }
  }
}

TEST(Knn, OneNearestRecallsTrainingPoints) {
  const auto d = blobs(80, 4, 3, 1.0, 4);
  Knn knn(1);
  knn.fit(d.x, d.y, d.k, kNoLimit, 0);
  EXPECT_EQ(knn.predict(d.x), d.y);
}

// ---- Gaussian Bayes --------------------------------------------------------

TEST(GaussianBayes, MatchesDirectLikelihoods) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto d = blobs(50, 4, 3, 2.5, seed);
    // Sparse-ish columns exercise the zero-row shortcut.
    for (std::size_t r = 0; r < d.x.rows(); r += 3) d.x(r, 1) = 0.0;
    const auto q = blobs(40, 4, 3, 6.0, seed + 50).x;
    for (double vs : {1e-9, 1e-3, 0.5}) {
      GaussianBayes nb(vs);
      nb.fit(d.x, d.y, d.k, kNoLimit, 0);
      const auto got = nb.log_likelihood(q);
      const auto want = testing::gaussian_oracle(d.x, d.y, d.k, q, vs);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-8 * (1.0 + std::fabs(want[i])));
      const auto pred = nb.predict(q);
      for (std::size_t i = 0; i < q.rows(); ++i) {
        const auto row = std::span<const double>(want).subspan(i * d.k, d.k);
        EXPECT_EQ(pred[i], std::max_element(row.begin(), row.end()) - row.begin());
      }
    }
  }
}

TEST(GaussianBayes, OriginGoesToMostLikelyClass) {
  // Class 0 centred at 0 with unit spread, class 1 centred at 3.
  Data d{Matrix(4, 1), {0, 0, 1, 1}, 2};
  d.x(0, 0) = -1.0;
  d.x(1, 0) = 1.0;
  d.x(2, 0) = 2.0;
  d.x(3, 0) = 4.0;
  GaussianBayes nb(1e-9);
  nb.fit(d.x, d.y, 2, kNoLimit, 0);
  // By hand: both variances 1; at x=0 class 0 has exponent 0, class 1 -4.5.
  const auto ll = nb.log_likelihood(Matrix(1, 1));
  EXPECT_NEAR(ll[0] - ll[1], 4.5, 1e-6);
  EXPECT_EQ(nb.predict(Matrix(1, 1)), std::vector<int>{0});
}

// ---- Linear ----------------------------------------------------------------

// Scaling a feature by c and its weight by 1/c must leave argmax decisions
// unchanged.
void expect_affine_invariance(const LinearModel& model, const Matrix& x, std::uint64_t seed) {
  util::Rng rng(seed);
  const auto base = model.predict(x);
  for (int t = 0; t < 5; ++t) {
    const std::size_t j = util::uniform_index(rng, x.cols());
    const double c = 0.1 + 10.0 * util::uniform01(rng);
    Matrix xs = x;
    for (std::size_t r = 0; r < xs.rows(); ++r) xs(r, j) *= c;
    LinearModel scaled = model;
    for (std::size_t k = 0; k < scaled.n_classes; ++k) scaled.weights[k * scaled.n_features + j] /= c;
    EXPECT_EQ(scaled.predict(xs), base);
  }
}

TEST(Ridge, FitsSeparableDataAndIsAffine) {
  const auto d = blobs(120, 5, 3, 1.0, 21);
  RidgeClassifier rid(0.1);
  rid.fit(d.x, d.y, d.k, kNoLimit, 0);
  EXPECT_GE(accuracy(rid.predict(d.x), d.y), 0.95);
  EXPECT_EQ(rid.predict(d.x), rid.model().predict(d.x));
  expect_affine_invariance(rid.model(), d.x, 1);
}

TEST(Ridge, SolvesNormalEquations) {
  // One feature, two classes: the intercept is free and the slope solves
  // (sum x^2 + alpha) w = sum x t after centring.
  Data d{Matrix(4, 1), {0, 0, 1, 1}, 2};
  const double xs[] = {-2, -1, 1, 2};
  for (int i = 0; i < 4; ++i) d.x(i, 0) = xs[i];
  const double alpha = 0.5;
  RidgeClassifier rid(alpha);
  rid.fit(d.x, d.y, 2, kNoLimit, 0);
  // Class 1 targets (-1,-1,1,1): mean 0, sum x t = 6, sum x^2 = 10.
  const auto& m = rid.model();
  EXPECT_NEAR(m.weights[1], 6.0 / (10.0 + alpha), 1e-9);
  EXPECT_NEAR(m.bias[1], 0.0, 1e-9);
  EXPECT_NEAR(m.weights[0], -6.0 / (10.0 + alpha), 1e-9);
}

TEST(LinearSvm, FitsSeparableDataAndIsAffine) {
  const auto d = blobs(150, 4, 3, 1.0, 22);
  LinearSvm svm(1e-3, 30);
  svm.fit(d.x, d.y, d.k, kNoLimit, 7);
  EXPECT_GE(accuracy(svm.predict(d.x), d.y), 0.95);
  expect_affine_invariance(svm.model(), d.x, 2);
}

// ---- Trees -----------------------------------------------------------------

TEST(DecisionTree, SeparableOneDimension) {
  Data d{Matrix(40, 1), std::vector<int>(40), 2};
  for (int i = 0; i < 40; ++i) {
    d.x(static_cast<std::size_t>(i), 0) = -20.0 + i;
    d.y[static_cast<std::size_t>(i)] = i < 20 ? 0 : 1;
  }
  DecisionTree dt;
  dt.fit(d.x, d.y, 2, kNoLimit, 0);
  EXPECT_EQ(dt.predict(d.x), d.y);
  EXPECT_EQ(dt.tree().depth(), 1u);
  EXPECT_EQ(dt.tree().nodes[0].threshold, -0.5);
}

TEST(DecisionTree, RespectsDepthAndLeafSize) {
  const auto d = blobs(300, 6, 4, 4.0, 5);
  for (int depth : {1, 2, 4}) {
    DecisionTree dt(TreeOptions{depth, 2, 5, 0});
    dt.fit(d.x, d.y, d.k, kNoLimit, 0);
    EXPECT_LE(dt.tree().depth(), static_cast<std::size_t>(depth));
  }
  // Every leaf holds at least min_samples_leaf training rows.
  DecisionTree dt(TreeOptions{0, 2, 7, 0});
  dt.fit(d.x, d.y, d.k, kNoLimit, 0);
  std::vector<std::size_t> leaf_rows(dt.tree().nodes.size(), 0);
  for (std::size_t r = 0; r < d.x.rows(); ++r) {
    const auto& leaf = dt.tree().leaf_for(d.x.row(r));
    ++leaf_rows[static_cast<std::size_t>(&leaf - dt.tree().nodes.data())];
  }
  for (std::size_t i = 0; i < leaf_rows.size(); ++i)
    if (dt.tree().nodes[i].feature < 0) EXPECT_GE(leaf_rows[i], 7u);
}

TEST(DecisionTree, UnlimitedDepthMemorisesDistinctRows) {
  const auto d = blobs(200, 3, 4, 5.0, 6);
  DecisionTree dt;
  dt.fit(d.x, d.y, d.k, kNoLimit, 0);
  EXPECT_EQ(dt.predict(d.x), d.y);
}

TEST(RandomForest, AccurateAndSeeded) {
  const auto d = blobs(200, 8, 3, 2.0, 8);
  const auto test = blobs(200, 8, 3, 2.0, 8);
  RandomForest a(30, TreeOptions{}), b(30, TreeOptions{});
  a.fit(d.x, d.y, d.k, kNoLimit, 11);
  b.fit(d.x, d.y, d.k, kNoLimit, 11);
  EXPECT_EQ(a.save(), b.save());
  EXPECT_EQ(a.trees().size(), 30u);
  EXPECT_GE(accuracy(a.predict(d.x), d.y), 0.97);
}

TEST(BoostedTrees, LearnsBlobs) {
  const auto d = blobs(200, 5, 3, 2.0, 9);
  BoostedTrees xgb(BoostedTrees::Options{30, 3, 0.3, 1.0, 1e-3});
  xgb.fit(d.x, d.y, d.k, kNoLimit, 0);
  EXPECT_GE(accuracy(xgb.predict(d.x), d.y), 0.97);
  const auto margins = xgb.margins(d.x);
  ASSERT_EQ(margins.size(), d.x.rows() * d.k);
  const auto pred = xgb.predict(d.x);
  for (std::size_t r = 0; r < d.x.rows(); ++r) {
    const auto row = std::span<const double>(margins).subspan(r * d.k, d.k);
    EXPECT_EQ(pred[r], std::max_element(row.begin(), row.end()) - row.begin());
  }
}

// ---- MLP -------------------------------------------------------------------

TEST(Mlp, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    util::Rng rng(seed);
    Matrix x(5, 3);
    for (std::size_t r = 0; r < 5; ++r)
      for (std::size_t c = 0; c < 3; ++c) x(r, c) = util::standard_normal(rng);
    const std::vector<int> y = {0, 1, 2, 1, 0};
    MlpParams p;
    p.inputs = 3;
    p.hidden = 4;
    p.outputs = 3;
    p.w1.resize(12);
    p.b1.resize(4);
    p.w2.resize(12);
    p.b2.resize(3);
    for (std::size_t i = 0; i < p.size(); ++i) p.at(i) = 0.5 * util::standard_normal(rng);
    const double l2 = 0.01;

    const auto [loss, grad] = mlp_loss_and_gradient(p, x, y, l2);
    EXPECT_NEAR(loss, testing::mlp_loss_oracle(p, x, y, l2), 1e-12);
    const double h = 1e-5;
    for (std::size_t i = 0; i < p.size(); ++i) {
      MlpParams plus = p, minus = p;
      plus.at(i) += h;
      minus.at(i) -= h;
      const double numeric = (testing::mlp_loss_oracle(plus, x, y, l2) - testing::mlp_loss_oracle(minus, x, y, l2)) / (2 * h);
      const double analytic = grad.at(i);
      const double scale = std::max(std::fabs(numeric), std::fabs(analytic));
      if (scale < 1e-7) {
        EXPECT_NEAR(analytic, numeric, 1e-9);
      } else {
        EXPECT_LE(std::fabs(analytic - numeric) / scale, 1e-4) << "parameter " << i;
      }
    }
  }
}

TEST(Mlp, LearnsBlobsDeterministically) {
  const auto d = blobs(150, 4, 3, 1.0, 31);
  Mlp a(Mlp::Options{16, 0.01, 60, 1e-4, 32}), b(Mlp::Options{16, 0.01, 60, 1e-4, 32});
  a.fit(d.x, d.y, d.k, kNoLimit, 3);
  b.fit(d.x, d.y, d.k, kNoLimit, 3);
  EXPECT_EQ(a.save(), b.save());
  EXPECT_GE(accuracy(a.predict(d.x), d.y), 0.95);
}

// ---- Shared behaviour ------------------------------------------------------

class EveryFamily : public ::testing::TestWithParam<Family> {};

Hyperparams first_point(Family f) { return default_algorithm(f).grid_point(0); }

TEST_P(EveryFamily, SaveLoadPredictsIdentically) {
  const auto d = blobs(90, 5, 3, 2.0, 41);
  auto a = make_classifier(GetParam(), first_point(GetParam()));
  a->fit(d.x, d.y, d.k, kNoLimit, 5);
  auto b = make_classifier(GetParam(), first_point(GetParam()));
  b->load(a->save());
  EXPECT_EQ(b->predict(d.x), a->predict(d.x));
  EXPECT_EQ(b->n_features(), 5u);
  EXPECT_EQ(b->n_classes(), 3u);
  EXPECT_EQ(b->save(), a->save());
}

TEST_P(EveryFamily, WidthMismatchAndEmptyInput) {
  const auto d = blobs(40, 5, 2, 2.0, 42);
  auto c = make_classifier(GetParam(), first_point(GetParam()));
  c->fit(d.x, d.y, d.k, kNoLimit, 5);
  EXPECT_THROW(c->predict(Matrix(3, 4)), SpecMismatchError);
  EXPECT_TRUE(c->predict(Matrix(0, 5)).empty());
}

TEST_P(EveryFamily, TinyBudgetTimesOut) {
  const auto d = blobs(20000, 40, 5, 2.0, 43);
  const auto out = train(GetParam(), first_point(GetParam()), d.x, d.y, d.k, BuildBudget{0.001, 0}, 1);
  EXPECT_TRUE(out.timed_out);
  EXPECT_FALSE(out.fitted());
  EXPECT_GT(out.train_time, 0.0);
}

TEST_P(EveryFamily, MemoryBudgetRejectsUpFront) {
  const auto d = blobs(200, 10, 2, 2.0, 44);
  const auto out = train(GetParam(), first_point(GetParam()), d.x, d.y, d.k, BuildBudget{0.0, 1024}, 1);
  EXPECT_TRUE(out.timed_out);
  EXPECT_NE(out.reason.find("memory"), std::string::npos);
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, EveryFamily, ::testing::ValuesIn(all_families()),
                         [](const auto& info) { return std::string(family_name(info.param)); });

TEST(Factory, RejectsBadHyperparameters) {
  EXPECT_THROW(make_classifier(Family::knn, {{"k", 0}}), ConfigError);
  EXPECT_THROW(make_classifier(Family::rid, {{"alpha", -1}}), ConfigError);
  EXPECT_THROW(make_classifier(Family::dt, {{"max_depth", std::nan("")}}), ConfigError);
}

TEST(Algorithms, TiersAndFiniteGrids) {
  EXPECT_EQ(families_in(std::vector<Tier>{Tier::required}),
            (std::vector<Family>{Family::dt, Family::rf, Family::knn, Family::gbay, Family::rid}));
  EXPECT_EQ(families_in(std::vector<Tier>{Tier::optional}), (std::vector<Family>{Family::svm_linear, Family::mlp, Family::xgb}));
  for (Family f : all_families()) {
    const auto spec = default_algorithm(f);
    EXPECT_EQ(spec.tier, family_tier(f));
    EXPECT_GE(spec.grid_size(), 1u);
    for (const auto& [name, values] : spec.grid)
      for (double v : values) EXPECT_TRUE(std::isfinite(v)) << name;
    EXPECT_EQ(parse_family(family_name(f)), f);
  }
}

}  // namespace
}  // namespace ctiv::learners
