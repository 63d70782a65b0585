#include "ctiv/evaluation/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "ctiv/errors.hpp"

namespace ctiv::evaluation {

using nlohmann::json;

const ClassCounts* ConfusionCounts::find(std::string_view label) const {
  for (const auto& c : classes)
    if (c.label == label) return &c;
  return nullptr;
}

ConfusionCounts confusion(std::span<const std::string> actual, std::span<const std::string> predicted) {
  if (actual.size() != predicted.size())
    throw ContractError("actual and predicted label lists differ in length");
  if (actual.empty()) throw ContractError("confusion needs at least one prediction");

  std::map<std::string, ClassCounts> by_label;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    by_label[actual[i]].label = actual[i];
    by_label[predicted[i]].label = predicted[i];
  }
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == predicted[i]) {
      ++by_label[actual[i]].tp;
    } else {
      ++by_label[actual[i]].fn;
      ++by_label[predicted[i]].fp;
    }
  }
  ConfusionCounts out;
  out.total = actual.size();
  for (auto& [label, c] : by_label) {
    c.tn = out.total - c.tp - c.fp - c.fn;
    out.classes.push_back(std::move(c));
  }
  return out;
}

ConfusionCounts confusion(std::span<const int> actual, std::span<const int> predicted) {
  std::vector<std::string> a, p;
  a.reserve(actual.size());
  p.reserve(predicted.size());
  for (int v : actual) a.push_back(std::to_string(v));
  for (int v : predicted) p.push_back(std::to_string(v));
  return confusion(std::span<const std::string>(a), std::span<const std::string>(p));
}

std::string_view averaging_name(Averaging a) { return a == Averaging::macro ? "macro" : "weighted"; }

EvalReport metrics(const ConfusionCounts& counts, Averaging averaging) {
  EvalReport report;
  report.averaging = averaging;
  std::size_t correct = 0;
  std::size_t support_total = 0;
  for (const auto& c : counts.classes) {
    ClassMetrics m;
    m.label = c.label;
    m.support = c.support();
    correct += c.tp;
    support_total += m.support;
    if (c.tp + c.fp == 0) {
      m.precision_undefined = true;
    } else {
      m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    }
    if (c.tp + c.fn == 0) {
      m.recall_undefined = true;
    } else {
      m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    report.zero_division = report.zero_division || m.precision_undefined || m.recall_undefined;
    report.per_class.push_back(std::move(m));
  }
  if (counts.total > 0) report.accuracy = static_cast<double>(correct) / static_cast<double>(counts.total);
  if (report.per_class.empty()) return report;

  double p = 0.0, r = 0.0, f = 0.0;
  if (averaging == Averaging::macro) {
    for (const auto& m : report.per_class) {
      p += m.precision;
      r += m.recall;
      f += m.f1;
    }
    const double k = static_cast<double>(report.per_class.size());
    report.precision = p / k;
    report.recall = r / k;
    report.f1 = f / k;
  } else if (support_total > 0) {
    for (const auto& m : report.per_class) {
      const double w = static_cast<double>(m.support);
      p += w * m.precision;
      r += w * m.recall;
      f += w * m.f1;
    }
    const double total = static_cast<double>(support_total);
    report.precision = p / total;
    report.recall = r / total;
    report.f1 = f / total;
  }
  return report;
}

TimingReport::TimingReport(double train_seconds, double predict_seconds)
    : train_(std::max(0.0, train_seconds)), predict_(std::max(0.0, predict_seconds)) {}

std::string report_to_text(const EvalReport& eval, const TimingReport* timing) {
  std::string out = "# ctiv-eval-report v" + std::to_string(kReportFormatVersion) + "\n";
  char line[256];
  std::snprintf(line, sizeof(line), "averaging\t%s\naccuracy\t%.6f\nprecision\t%.6f\nrecall\t%.6f\nf1\t%.6f\n",
                std::string(averaging_name(eval.averaging)).c_str(), eval.accuracy, eval.precision,
                eval.recall, eval.f1);
  out += line;
  out += "class\tprecision\trecall\tf1\tsupport\n";
  for (const auto& m : eval.per_class) {
    std::snprintf(line, sizeof(line), "%s\t%.6f%s\t%.6f%s\t%.6f\t%zu\n", m.label.c_str(), m.precision,
                  m.precision_undefined ? "*" : "", m.recall, m.recall_undefined ? "*" : "", m.f1,
                  m.support);
    out += line;
  }
  if (timing) {
    std::snprintf(line, sizeof(line), "train_time\t%.6f\npredict_time\t%.6f\ncomputation_time\t%.6f\n",
                  timing->train_time(), timing->predict_time(), timing->computation_time());
    out += line;
  }
  return out;
}

json report_to_json(const EvalReport& eval) {
  json per_class = json::array();
  for (const auto& m : eval.per_class) {
    per_class.push_back({{"label", m.label},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support},
                         {"precision_undefined", m.precision_undefined},
                         {"recall_undefined", m.recall_undefined}});
  }
  return {{"format_version", kReportFormatVersion},
          {"averaging", std::string(averaging_name(eval.averaging))},
          {"accuracy", eval.accuracy},
          {"precision", eval.precision},
          {"recall", eval.recall},
          {"f1", eval.f1},
          {"zero_division", eval.zero_division},
          {"per_class", std::move(per_class)}};
}

EvalReport report_from_json(const json& doc) {
  if (doc.value("format_version", 0) != kReportFormatVersion)
    throw FormatError("unsupported evaluation report version");
  EvalReport r;
  r.averaging = doc.at("averaging").get<std::string>() == "weighted" ? Averaging::weighted : Averaging::macro;
  r.accuracy = doc.at("accuracy").get<double>();
  r.precision = doc.at("precision").get<double>();
  r.recall = doc.at("recall").get<double>();
  r.f1 = doc.at("f1").get<double>();
  r.zero_division = doc.at("zero_division").get<bool>();
  for (const auto& m : doc.at("per_class")) {
    r.per_class.push_back({m.at("label").get<std::string>(), m.at("precision").get<double>(),
                           m.at("recall").get<double>(), m.at("f1").get<double>(),
                           m.at("support").get<std::size_t>(), m.at("precision_undefined").get<bool>(),
                           m.at("recall_undefined").get<bool>()});
  }
  return r;
}

json timing_to_json(const TimingReport& timing) {
  return {{"train_time", timing.train_time()},
          {"predict_time", timing.predict_time()},
          {"computation_time", timing.computation_time()}};
}

TimingReport timing_from_json(const json& doc) {
  return TimingReport(doc.at("train_time").get<double>(), doc.at("predict_time").get<double>());
}

}  // namespace ctiv::evaluation
