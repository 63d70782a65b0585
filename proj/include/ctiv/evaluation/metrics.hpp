#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ctiv::evaluation {

struct ClassCounts {
  std::string label;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t support() const { return tp + fn; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

// One-vs-rest counts for every class seen in either label list, classes in
// sorted order.
struct ConfusionCounts {
  std::size_t total = 0;
  std::vector<ClassCounts> classes;

  const ClassCounts* find(std::string_view label) const;
};

// Throws ContractError on a length mismatch or empty input.
ConfusionCounts confusion(std::span<const std::string> actual, std::span<const std::string> predicted);
ConfusionCounts confusion(std::span<const int> actual, std::span<const int> predicted);

enum class Averaging { macro, weighted };

std::string_view averaging_name(Averaging a);

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  bool precision_undefined = false;  // TP + FP == 0
  bool recall_undefined = false;     // TP + FN == 0
};

struct EvalReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Averaging averaging = Averaging::macro;
  std::vector<ClassMetrics> per_class;
  bool zero_division = false;  // some class hit a zero denominator
};

// Precision TP/(TP+FP), recall TP/(TP+FN), F1 2PR/(P+R) per class, zero
// (flagged) where a denominator vanishes, then averaged. Accuracy is the
// fraction of correct predictions.
EvalReport metrics(const ConfusionCounts& counts, Averaging averaging = Averaging::macro);

// Wall-clock cost of one model: computation = train + predict.
class TimingReport {
 public:
  TimingReport() = default;
  TimingReport(double train_seconds, double predict_seconds);

  double train_time() const { return train_; }
  double predict_time() const { return predict_; }
  double computation_time() const { return train_ + predict_; }

  friend bool operator==(const TimingReport&, const TimingReport&) = default;

 private:
  double train_ = 0.0;
  double predict_ = 0.0;
};

inline constexpr int kReportFormatVersion = 1;

// Line-oriented text table; first line names the format version.
std::string report_to_text(const EvalReport& eval, const TimingReport* timing = nullptr);
nlohmann::json report_to_json(const EvalReport& eval);
EvalReport report_from_json(const nlohmann::json& doc);
nlohmann::json timing_to_json(const TimingReport& timing);
TimingReport timing_from_json(const nlohmann::json& doc);

}  // namespace ctiv::evaluation
