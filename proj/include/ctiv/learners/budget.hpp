#pragma once

#include <chrono>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>

namespace ctiv::learners {

// Per-candidate resource limits. Zero means unlimited.
struct BuildBudget {
  double wall_seconds = 0.0;
  std::size_t memory_bytes = 0;

  bool unlimited() const { return wall_seconds <= 0.0 && memory_bytes == 0; }
};

// Raised inside training loops when a budget runs out; never escapes the
// learners module, where it becomes a timed-out outcome.
class BudgetExceeded : public std::exception {
 public:
  BudgetExceeded(std::string reason, double elapsed) : reason_(std::move(reason)), elapsed_(elapsed) {}
  const char* what() const noexcept override { return reason_.c_str(); }
  double elapsed() const { return elapsed_; }

 private:
  std::string reason_;
  double elapsed_;
};

// Cooperative deadline: training loops call check() between units of work.
class BudgetGuard {
 public:
  using Clock = std::chrono::steady_clock;

  BudgetGuard() : BudgetGuard(BuildBudget{}) {}
  explicit BudgetGuard(BuildBudget budget) : budget_(budget), start_(Clock::now()) {}

  const BuildBudget& budget() const { return budget_; }
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  void check() const {
    if (budget_.wall_seconds > 0.0) {
      const double e = elapsed();
      if (e > budget_.wall_seconds) throw BudgetExceeded("wall-clock budget exhausted", e);
    }
  }

  // Throws when an up-front memory estimate exceeds the byte budget.
  void reserve(std::size_t estimated_bytes) const {
    if (budget_.memory_bytes > 0 && estimated_bytes > budget_.memory_bytes)
      throw BudgetExceeded("memory budget exceeded", elapsed());
  }

 private:
  BuildBudget budget_;
  Clock::time_point start_;
};

}  // namespace ctiv::learners
