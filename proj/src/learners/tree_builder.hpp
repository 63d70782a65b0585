#pragma once

// Shared greedy split search for classification and boosting trees. Works
// column-wise over a CSC copy of the data: only stored nonzeros are sorted,
// and all zero cells of a node move across a threshold as one block.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "ctiv/features/matrix.hpp"
#include "ctiv/learners/budget.hpp"
#include "ctiv/learners/classifier.hpp"
#include "ctiv/util/random.hpp"

namespace ctiv::learners::detail {

// Weighted class counts with an incrementally maintained sum of squares;
// score() is sum(c^2)/n, so score(L) + score(R) - score(P) is the weighted
// Gini decrease times n.
struct GiniPolicy {
  struct Acc {
    std::vector<double> counts;
    double n = 0.0;
    double sq = 0.0;
  };

  std::span<const int> y;
  std::span<const double> weight;
  std::size_t n_classes = 0;
  std::size_t min_leaf = 1;

  Acc zero() const { return Acc{std::vector<double>(n_classes, 0.0), 0.0, 0.0}; }
  void add(Acc& a, std::uint32_t row) const {
    const double w = weight[row];
    double& c = a.counts[static_cast<std::size_t>(y[row])];
    a.sq += 2.0 * c * w + w * w;
    c += w;
    a.n += w;
  }
  void remove(Acc& a, std::uint32_t row) const {
    const double w = weight[row];
    double& c = a.counts[static_cast<std::size_t>(y[row])];
    c -= w;
    a.sq -= 2.0 * c * w + w * w;
    a.n -= w;
  }
  static void recompute(Acc& a) {
    a.sq = 0.0;
    for (double c : a.counts) a.sq += c * c;
  }
  void merge(Acc& a, const Acc& b) const {
    for (std::size_t k = 0; k < n_classes; ++k) a.counts[k] += b.counts[k];
    a.n += b.n;
    recompute(a);
  }
  void subtract(Acc& a, const Acc& b) const {
    for (std::size_t k = 0; k < n_classes; ++k) a.counts[k] -= b.counts[k];
    a.n -= b.n;
    recompute(a);
  }
  double score(const Acc& a) const { return a.n > 0.0 ? a.sq / a.n : 0.0; }
  double count(const Acc& a) const { return a.n; }
  bool leaf_ok(const Acc& a) const { return a.n >= static_cast<double>(min_leaf); }
  bool pure(const Acc& a) const {
    return std::count_if(a.counts.begin(), a.counts.end(), [](double c) { return c > 0.0; }) <= 1;
  }
  std::vector<double> leaf_value(const Acc& a) const {
    std::vector<double> p = a.counts;
    if (a.n > 0.0)
      for (double& v : p) v /= a.n;
    return p;
  }
};

// Gradient/hessian sums; score() is G^2 / (H + lambda).
struct NewtonPolicy {
  struct Acc {
    double g = 0.0;
    double h = 0.0;
    double n = 0.0;
  };

  std::span<const double> grad;
  std::span<const double> hess;
  double lambda = 1.0;
  double min_child_weight = 1e-3;
  std::size_t min_leaf = 1;

  Acc zero() const { return {}; }
  void add(Acc& a, std::uint32_t row) const {
    a.g += grad[row];
    a.h += hess[row];
    a.n += 1.0;
  }
  void remove(Acc& a, std::uint32_t row) const {
    a.g -= grad[row];
    a.h -= hess[row];
    a.n -= 1.0;
  }
  void merge(Acc& a, const Acc& b) const {
    a.g += b.g;
    a.h += b.h;
    a.n += b.n;
  }
  void subtract(Acc& a, const Acc& b) const {
    a.g -= b.g;
    a.h -= b.h;
    a.n -= b.n;
  }
  double score(const Acc& a) const { return a.g * a.g / (a.h + lambda); }
  double count(const Acc& a) const { return a.n; }
  bool leaf_ok(const Acc& a) const { return a.n >= static_cast<double>(min_leaf) && a.h >= min_child_weight; }
  bool pure(const Acc&) const { return false; }
  std::vector<double> leaf_value(const Acc& a) const { return {-a.g / (a.h + lambda)}; }
};

template <class Policy>
class TreeBuilder {
 public:
  using Acc = typename Policy::Acc;

  TreeBuilder(const features::Matrix& x, const features::CscMatrix& csc, const Policy& policy,
              const TreeOptions& options, const BudgetGuard& guard, util::Rng* rng)
      : x_(x), csc_(csc), policy_(policy), options_(options), guard_(guard), rng_(rng),
        mark_(x.rows(), 0), features_(x.cols()) {
    std::iota(features_.begin(), features_.end(), 0u);
  }

  // `rows` must be distinct.
  Tree build(std::vector<std::uint32_t> rows) {
    Tree tree;
    struct Work {
      int node;
      std::vector<std::uint32_t> rows;
      int depth;
    };
    std::vector<Work> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::move(rows), 0});
    while (!stack.empty()) {
      guard_.check();
      Work work = std::move(stack.back());
      stack.pop_back();

      Acc total = policy_.zero();
      for (auto r : work.rows) policy_.add(total, r);
      tree.nodes[work.node].value = policy_.leaf_value(total);

      const bool depth_left = options_.max_depth <= 0 || work.depth < options_.max_depth;
      if (!depth_left || policy_.count(total) < static_cast<double>(options_.min_samples_split) ||
          policy_.pure(total))
        continue;
      const Split split = find_split(work.rows, total);
      if (split.feature < 0) continue;

      std::vector<std::uint32_t> left, right;
      for (auto r : work.rows) (x_(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
      if (left.empty() || right.empty()) continue;

      const int li = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[work.node];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = li;
      node.right = li + 1;
      // Right pushed first so the left subtree is expanded first.
      stack.push_back({li + 1, std::move(right), work.depth + 1});
      stack.push_back({li, std::move(left), work.depth + 1});
    }
    return tree;
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };
  struct Entry {
    double value;
    std::uint32_t row;
  };

  std::span<const std::uint32_t> candidate_features() {
    const std::size_t m = options_.max_features;
    if (m == 0 || m >= features_.size() || rng_ == nullptr) return features_;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + util::uniform_index(*rng_, features_.size() - i);
      std::swap(features_[i], features_[j]);
    }
    return std::span<const std::uint32_t>(features_).first(m);
  }

  Split find_split(const std::vector<std::uint32_t>& rows, const Acc& total) {
    ++stamp_;
    for (auto r : rows) mark_[r] = stamp_;
    const double parent = policy_.score(total);
    Split best;
    best.gain = 1e-12;

    // Feature order must not depend on the subsample shuffle for the
    // tie-break below, so candidates are visited in index order.
    const auto picked = candidate_features();
    std::vector<std::uint32_t> cand(picked.begin(), picked.end());
    if (options_.max_features != 0) std::sort(cand.begin(), cand.end());

    for (auto f : cand) {
      entries_.clear();
      const std::size_t begin = csc_.indptr[f], end = csc_.indptr[f + 1];
      if (rows.size() < end - begin) {
        for (auto r : rows) {
          const double v = x_(r, f);
          if (v != 0.0) entries_.push_back({v, r});
        }
      } else {
        for (std::size_t p = begin; p < end; ++p)
          if (mark_[csc_.indices[p]] == stamp_) entries_.push_back({csc_.values[p], csc_.indices[p]});
      }
      if (entries_.empty()) continue;
      const bool has_zero = entries_.size() < rows.size();

      Acc nonzero = policy_.zero();
      for (const auto& e : entries_) policy_.add(nonzero, e.row);
      Acc zero_block = total;
      policy_.subtract(zero_block, nonzero);

      std::sort(entries_.begin(), entries_.end(),
                [](const Entry& a, const Entry& b) { return a.value < b.value || (a.value == b.value && a.row < b.row); });

      Acc left = policy_.zero();
      Acc right = total;
      bool any = false;
      double prev = 0.0;
      const auto boundary = [&](double next) {
        if (!any || next == prev) return;
        if (!policy_.leaf_ok(left) || !policy_.leaf_ok(right)) return;
        const double gain = policy_.score(left) + policy_.score(right) - parent;
        if (gain > best.gain) {
          double thr = prev + (next - prev) / 2.0;
          if (!(thr < next)) thr = prev;
          best = {static_cast<int>(f), thr, gain};
        }
      };
      std::size_t i = 0;
      for (; i < entries_.size() && entries_[i].value < 0.0; ++i) {
        boundary(entries_[i].value);
        policy_.add(left, entries_[i].row);
        policy_.remove(right, entries_[i].row);
        prev = entries_[i].value;
        any = true;
      }
      if (has_zero) {
        boundary(0.0);
        policy_.merge(left, zero_block);
        policy_.subtract(right, zero_block);
        prev = 0.0;
        any = true;
      }
      for (; i < entries_.size(); ++i) {
        boundary(entries_[i].value);
        policy_.add(left, entries_[i].row);
        policy_.remove(right, entries_[i].row);
        prev = entries_[i].value;
        any = true;
      }
    }
    return best.feature >= 0 ? best : Split{};
  }

  const features::Matrix& x_;
  const features::CscMatrix& csc_;
  const Policy& policy_;
  TreeOptions options_;
  const BudgetGuard& guard_;
  util::Rng* rng_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::vector<std::uint32_t> features_;
  std::vector<Entry> entries_;
};

}  // namespace ctiv::learners::detail
