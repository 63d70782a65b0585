// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// FAIL. Each criterion also has a wall-clock limit.

#include <algorithm>
#include <barrier>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctiv/bench/bench.hpp"
#include "ctiv/evaluation/metrics.hpp"
#include "ctiv/features/categorical.hpp"
#include "ctiv/features/text.hpp"
#include "ctiv/features/vectorizers.hpp"
#include "ctiv/ingest/misp.hpp"
#include "ctiv/learners/build.hpp"
#include "ctiv/learners/classifier.hpp"
#include "ctiv/learners/model.hpp"
#include "ctiv/orchestrator/orchestrator.hpp"
#include "ctiv/util/random.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

using namespace ctiv;
using ingest::Field;

// Tolerances and limits.
constexpr double kMetricTolerance = 1e-9;
constexpr double kGradientRelTolerance = 1e-4;
constexpr double kGaussianRelTolerance = 1e-8;
constexpr double kPlantedMinF1 = 0.95;
constexpr double kSavingsFloor = 0.99;

// Collects the first few failed expectations of one criterion.
class Check {
 public:
  void expect(bool condition, const std::string& what) {
    if (condition) return;
    ++failures_;
    if (failures_ <= 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  void note(const std::string& what) { info_ += (info_.empty() ? "" : ", ") + what; }
  bool ok() const { return failures_ == 0; }
  std::string summary() const {
    if (ok()) return info_;
    return std::to_string(failures_) + " failure(s): " + notes_;
  }

 private:
  int failures_ = 0;
  std::string notes_;
  std::string info_;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2e", v);
  return buf;
}

struct Criterion {
  std::string name;
  double limit_seconds;
  std::function<void(Check&)> body;
};

// ---- criteria --------------------------------------------------------------

void count_vectorizer_table(Check& c) {
  features::TextOptions plain;
  plain.stop_words.clear();
  plain.stemmer = features::Stemmer::none;
  const std::vector<features::TokenList> corpus = {features::clean_text("Fireball is malware", plain),
                                                   features::clean_text("Malware is any program that is harmful", plain)};
  const auto cv = features::CountVectorizer::fit(corpus);
  const std::vector<std::string> vocab = {"fireball", "is", "malware", "any", "program", "that", "harmful"};
  c.expect(cv.vocabulary.tokens() == vocab, "vocabulary differs");
  const auto m = cv.transform(corpus);
  const std::vector<std::vector<double>> expected = {{1, 1, 1, 0, 0, 0, 0}, {0, 2, 1, 1, 1, 1, 1}};
  c.expect(m.rows() == 2 && m.cols() == 7, "shape differs");
  if (m.rows() == 2 && m.cols() == 7)
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t j = 0; j < 7; ++j)
        c.expect(m(r, j) == expected[r][j], "cell (" + std::to_string(r) + "," + std::to_string(j) + ")");
  c.note("S2 'is' count " + fmt(m(1, 1), 0));
}

void categorical_table(Check& c) {
  // Fit in first-appearance order over the table's category columns.
  const std::vector<std::string> header = {"Phishing", "DDoS", "SQL injection"};
  const auto map = features::CategoryMap::fit(header);
  const std::vector<std::string> column = {"DDoS", "Phishing", "DDoS", "Phishing", "Phishing", "SQL injection"};
  const std::vector<std::size_t> codes = {2, 1, 2, 1, 1, 3};
  const std::vector<std::vector<double>> onehot = {{0, 1, 0}, {1, 0, 0}, {0, 1, 0}, {1, 0, 0}, {1, 0, 0}, {0, 0, 1}};
  for (std::size_t i = 0; i < column.size(); ++i) {
    c.expect(map.code(column[i]) == codes[i], "label code row " + std::to_string(i + 1));
    c.expect(map.one_hot(column[i]) == onehot[i], "one-hot row " + std::to_string(i + 1));
  }
  c.note("codes 2,1,2,1,1,3");
}

void metric_oracle(Check& c) {
  util::Rng rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + util::uniform_index(rng, 200);
    const std::size_t k = 1 + util::uniform_index(rng, 5);
    std::vector<std::string> actual(n), predicted(n);
    for (std::size_t i = 0; i < n; ++i) {
      actual[i] = std::string(1, static_cast<char>('A' + util::uniform_index(rng, k)));
      predicted[i] = util::uniform01(rng) < 0.5 ? actual[i]
                                                : std::string(1, static_cast<char>('A' + util::uniform_index(rng, k)));
    }
    const auto o = testing::metrics_oracle(actual, predicted);
    const auto counts = evaluation::confusion(actual, predicted);
    const auto m = evaluation::metrics(counts, evaluation::Averaging::macro);
    const auto w = evaluation::metrics(counts, evaluation::Averaging::weighted);
    for (double d : {m.accuracy - o.accuracy, m.precision - o.macro_p, m.recall - o.macro_r, m.f1 - o.macro_f1,
                     w.precision - o.weighted_p, w.recall - o.weighted_r, w.f1 - o.weighted_f1})
      worst = std::max(worst, std::fabs(d));
  }
  c.expect(worst <= kMetricTolerance, "max deviation " + sci(worst));

  // Timing identity on measured reports from a real build and on random ones.
  const auto ds = ingest::normalize(testing::planted_rule(200, 5).records, "planted");
  const auto sel = ingest::select_columns(ds, std::vector<Field>{Field::domain}, Field::attack);
  std::size_t reports = 0;
  for (const auto& cand : learners::build_candidates(sel.table, {"k", ds.fingerprint()}, {}, 1)) {
    if (!cand.model) continue;
    const auto& t = cand.model->timing;
    c.expect(t.computation_time() == t.train_time() + t.predict_time(), "measured timing identity");
    ++reports;
  }
  for (int i = 0; i < 1000; ++i) {
    const evaluation::TimingReport t(util::uniform01(rng) * 1e4, util::uniform01(rng) * 10);
    c.expect(t.computation_time() == t.train_time() + t.predict_time(), "random timing identity");
    ++reports;
  }
  c.note("1000 sets, max deviation " + sci(worst) + ", " + std::to_string(reports) + " timing reports");
}

void combinatorics(Check& c) {
  c.expect(bench::count_feature_combinations(6) == 62, "C(6)");
  c.expect(bench::count_feature_combinations(13) == 8190, "C(13)");
  const auto web = bench::website_feed_plan();
  const auto misp = bench::misp_feed_plan();
  const auto misp_prebuild = bench::count_experiments(misp, bench::Mode::prebuild_all);
  const auto web_demand = bench::count_experiments(web, bench::Mode::on_demand);
  const auto misp_demand = bench::count_experiments(misp, bench::Mode::on_demand);
  c.expect(misp_prebuild == 524160, "misp prebuild " + std::to_string(misp_prebuild));
  c.expect(web_demand == 112, "website on-demand " + std::to_string(web_demand));
  c.expect(misp_demand == 704, "misp on-demand " + std::to_string(misp_demand));
  c.expect(web_demand + misp_demand == 816, "on-demand total");
  const bench::BenchPlan all_sets{"all-sets", 13, 8, 2, 5, 18};
  c.expect(bench::count_experiments(all_sets, bench::Mode::on_demand) == 1440, "18 sets x 5 labels");

  const double savings = 1.0 - static_cast<double>(web_demand + misp_demand) / static_cast<double>(misp_prebuild);
  c.expect(savings >= kSavingsFloor, "savings " + fmt(savings));
  const std::vector<bench::BenchPlan> plans = {web, misp};
  const std::vector<bench::TimingSample> samples = {{1.0, false}};
  const auto report = bench::bench_report(plans, samples);
  c.expect(report.savings >= kSavingsFloor, "report savings " + fmt(report.savings));
  c.note("savings " + fmt(savings));
}

void planted_end_to_end(Check& c) {
  testing::TempDir dir("acceptance");
  const auto rule = testing::planted_rule(2000, 2024);
  const auto dataset = ingest::normalize(rule.records, "planted");
  const auto alerts = testing::planted_alerts(rule, 300, 7);
  orchestrator::ModelRegistry registry(dir.path());
  orchestrator::NotificationLog log;
  orchestrator::Orchestrator orch(registry, log);  // required tier
  const auto req = orchestrator::make_requirement({Field::domain}, Field::attack, kPlantedMinF1);
  const auto out = orch.validate(req, alerts.records, dataset, {}, 42);
  const auto* p = out.as_predicted();
  c.expect(p != nullptr, "not predicted");
  if (!p) return;
  c.expect(p->f1 >= kPlantedMinF1, "held-out F1 " + fmt(p->f1));
  const auto alert_metrics = evaluation::metrics(evaluation::confusion(alerts.truth, p->labels));
  c.expect(alert_metrics.f1 >= kPlantedMinF1, "alert macro F1 " + fmt(alert_metrics.f1));
  c.note("held-out F1 " + fmt(p->f1) + ", alert macro F1 " + fmt(alert_metrics.f1) + ", " +
         std::string(learners::family_name(p->model->family)));
}

void algorithm_paths(Check& c) {
  const auto rule = testing::planted_rule(800, 11);
  const auto dataset = ingest::normalize(rule.records, "planted");
  const auto alerts = testing::planted_alerts(rule, 50, 12);
  {
    testing::TempDir dir("acceptance");
    orchestrator::ModelRegistry registry(dir.path());
    orchestrator::NotificationLog log;
    orchestrator::Orchestrator orch(registry, log);
    const auto known = orchestrator::make_requirement({Field::domain}, Field::attack, 0.9);
    const auto absent = orchestrator::make_requirement({Field::domain}, Field::threat_type, 0.5);

    // Script: miss with data, hit, no data, hit.
    const auto miss = orch.validate(known, alerts.records, dataset, {}, 1);
    c.expect(miss.predicted() && !miss.as_predicted()->cache_hit && miss.build, "miss did not build");
    c.expect(registry.build_count() == 1, "miss built " + std::to_string(registry.build_count()) + " times");
    const auto hit = orch.validate(known, alerts.records, dataset, {}, 1);
    c.expect(hit.predicted() && hit.as_predicted()->cache_hit && !hit.build, "hit was not served from registry");
    const auto none = orch.validate(absent, alerts.records, dataset, {}, 1);
    const auto* na = none.as_not_applicable();
    c.expect(na && na->reason == orchestrator::NotApplicableReason::no_data, "no-data path");
    c.expect(none.data_requested && none.data_requested->missing == std::vector<Field>{Field::threat_type},
             "data request");
    const auto again = orch.validate(known, alerts.records, dataset, {}, 1);
    c.expect(again.predicted() && again.as_predicted()->cache_hit, "second hit");
    c.expect(registry.build_count() == 1, "rebuilt on a hit");
    c.expect(hit.predicted() && miss.predicted() && hit.as_predicted()->labels == miss.as_predicted()->labels,
             "hit labels differ");
  }
  {
    testing::TempDir dir("acceptance");
    orchestrator::ModelRegistry registry(dir.path());
    orchestrator::NotificationLog log;
    orchestrator::Orchestrator orch(registry, log);
    const auto known = orchestrator::make_requirement({Field::domain}, Field::attack, 0.9);
    std::barrier start(8);
    std::vector<bool> predicted(8, false);
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < 8; ++t)
      threads.emplace_back([&, t] {
        start.arrive_and_wait();
        predicted[t] = orch.validate(known, alerts.records, dataset, {}, 1).predicted();
      });
    for (auto& th : threads) th.join();
    c.expect(registry.build_count() == 1, "8 concurrent requests built " + std::to_string(registry.build_count()));
    c.expect(std::all_of(predicted.begin(), predicted.end(), [](bool b) { return b; }), "concurrent predictions");
    c.note("8 concurrent requests, " + std::to_string(registry.build_count()) + " build");
  }
}

void confidence_gating(Check& c) {
  testing::TempDir dir("acceptance");
  const auto dataset = ingest::normalize(testing::noisy_rule(500, 0.3, 15).records, "noisy");
  const auto alerts = testing::planted_alerts(testing::planted_rule(10, 1), 20, 2);
  orchestrator::ModelRegistry registry(dir.path());
  orchestrator::NotificationLog log;
  orchestrator::Orchestrator orch(registry, log);

  const auto high = orch.validate(orchestrator::make_requirement({Field::domain}, Field::attack, 0.9), alerts.records,
                                  dataset, {}, 2024);
  const auto* na = high.as_not_applicable();
  c.expect(na && na->reason == orchestrator::NotApplicableReason::below_confidence, "0.9 was not below-confidence");
  const double best = na && na->best_f1 ? *na->best_f1 : -1.0;
  c.expect(best > 0.5 && best < 0.7, "best F1 " + fmt(best) + " outside (0.5, 0.7)");
  c.expect(registry.lookup(high.requirement_key, 0.0) == nullptr, "below-confidence model registered");

  const auto low = orch.validate(orchestrator::make_requirement({Field::domain}, Field::attack, 0.5), alerts.records,
                                 dataset, {}, 2024);
  c.expect(low.predicted(), "0.5 was not predicted");
  c.expect(low.predicted() && low.as_predicted()->f1 >= 0.5, "predicted below 0.5");
  c.note("best F1 " + fmt(best));
}

void budget_enforcement(Check& c) {
  testing::TempDir dir("acceptance");
  const auto rule = testing::planted_rule(1500, 21);
  const auto dataset = ingest::normalize(rule.records, "planted");
  const auto alerts = testing::planted_alerts(rule, 50, 22);
  orchestrator::OrchestratorOptions options;
  options.build.family_budgets[learners::Family::rf] = {1e-6, 0};
  orchestrator::ModelRegistry registry(dir.path());
  orchestrator::NotificationLog log;
  orchestrator::Orchestrator orch(registry, log, options);
  const auto out = orch.validate(orchestrator::make_requirement({Field::domain}, Field::attack, 0.9), alerts.records,
                                 dataset, {}, 3);
  c.expect(out.build != nullptr, "no build report");
  if (!out.build) return;
  double best_survivor = -1.0;
  std::size_t timed_out = 0;
  for (const auto& cand : out.build->candidates) {
    if (cand.family == learners::Family::rf)
      c.expect(cand.status == learners::CandidateStatus::timed_out, "rf did not time out");
    if (cand.status == learners::CandidateStatus::timed_out) ++timed_out;
    if (cand.status == learners::CandidateStatus::fitted) best_survivor = std::max(best_survivor, cand.f1);
  }
  const auto* p = out.as_predicted();
  c.expect(p != nullptr, "no prediction from survivors");
  if (!p) return;
  c.expect(p->model->family != learners::Family::rf, "timed-out family selected");
  c.expect(p->f1 == best_survivor, "did not serve the best survivor");
  c.note(std::to_string(timed_out) + " timed out, served " + std::string(learners::family_name(p->model->family)) +
         " F1 " + fmt(p->f1));
}

features::Matrix integer_points(std::size_t rows, std::size_t cols, std::vector<int>& y, std::size_t classes,
                                util::Rng& rng) {
  features::Matrix x(rows, cols);
  y.assign(rows, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = static_cast<int>(util::uniform_index(rng, classes));
    for (std::size_t j = 0; j < cols; ++j)
      x(r, j) = static_cast<double>(util::uniform_index(rng, 4)) + (y[r] == 1 ? 1.5 : 0.0) * util::uniform01(rng);
  }
  return x;
}

void learner_oracles(Check& c) {
  const learners::BudgetGuard unlimited{};
  util::Rng rng(99);
  std::size_t knn_queries = 0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<int> y, yq;
    const auto x = integer_points(20 + 18 * static_cast<std::size_t>(trial), 3, y, 3, rng);  // at most 182 rows
    const auto q = integer_points(50, 3, yq, 3, rng);
    for (std::size_t k : {1, 3, 5, 8}) {
      learners::Knn knn(k);
      knn.fit(x, y, 3, unlimited, 0);
      c.expect(knn.predict(q) == testing::knn_oracle(x, y, 3, q, k), "knn k=" + std::to_string(k));
      knn_queries += q.rows();
    }

    learners::GaussianBayes nb(1e-9);
    nb.fit(x, y, 3, unlimited, 0);
    const auto want = testing::gaussian_oracle(x, y, 3, q, 1e-9);
    const auto got = nb.log_likelihood(q);
    for (std::size_t i = 0; i < want.size(); ++i)
      c.expect(std::fabs(got[i] - want[i]) <= kGaussianRelTolerance * (1.0 + std::fabs(want[i])), "gbay likelihood");
    const auto pred = nb.predict(q);
    for (std::size_t i = 0; i < q.rows(); ++i) {
      const auto row = std::span<const double>(want).subspan(i * 3, 3);
      c.expect(pred[i] == std::max_element(row.begin(), row.end()) - row.begin(), "gbay argmax");
    }
  }

  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    util::Rng r(seed);
    features::Matrix x(6, 3);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 3; ++j) x(i, j) = util::standard_normal(r);
    const std::vector<int> y = {0, 1, 2, 1, 0, 2};
    learners::MlpParams p;
    p.inputs = 3;
    p.hidden = 5;
    p.outputs = 3;
    p.w1.resize(15);
    p.b1.resize(5);
    p.w2.resize(15);
    p.b2.resize(3);
    for (std::size_t i = 0; i < p.size(); ++i) p.at(i) = 0.5 * util::standard_normal(r);
    const auto [loss, grad] = learners::mlp_loss_and_gradient(p, x, y, 0.01);
    const double h = 1e-5;
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto plus = p, minus = p;
      plus.at(i) += h;
      minus.at(i) -= h;
      const double numeric =
          (testing::mlp_loss_oracle(plus, x, y, 0.01) - testing::mlp_loss_oracle(minus, x, y, 0.01)) / (2 * h);
      const double scale = std::max(std::fabs(numeric), std::fabs(grad.at(i)));
      if (scale < 1e-7) continue;
      worst = std::max(worst, std::fabs(grad.at(i) - numeric) / scale);
    }
  }
  c.expect(worst <= kGradientRelTolerance, "mlp gradient relative error " + sci(worst));

  // Selection replays byte for byte; the fixture has a unique top F1 so
  // measured time never breaks a tie.
  const auto ds = ingest::normalize(testing::noisy_rule(500, 0.3, 15).records, "noisy");
  const auto sel = ingest::select_columns(ds, std::vector<Field>{Field::domain}, Field::attack);
  std::vector<std::string> runs;
  for (int i = 0; i < 2; ++i) {
    const auto cands = learners::build_candidates(sel.table, {"k", ds.fingerprint()}, {}, 2024);
    std::vector<double> f1s;
    for (const auto& cand : cands)
      if (cand.model) f1s.push_back(cand.model->f1());
    std::sort(f1s.rbegin(), f1s.rend());
    c.expect(f1s.size() >= 2 && f1s[0] > f1s[1], "top F1 not unique");
    const auto best = learners::select_optimal(std::span<const learners::Candidate>(cands));
    runs.push_back(best ? learners::model_to_json(*best, false) : "");
  }
  c.expect(!runs[0].empty() && runs[0] == runs[1], "selected model differs between runs");
  c.note(std::to_string(knn_queries) + " knn queries, mlp max rel err " + sci(worst));
}

void ingestion_round_trip(Check& c) {
  const std::vector<std::pair<std::string, std::string>> attrs = {
      {"ip-dst", "10.0.0.1"},
      {"ip-port", "23.229.221.200|40"},
      {"ip-dst|port", "10.0.0.2|8080"},
      {"ip-src", "10.0.0.3"},
      {"ip-src|port", "10.0.0.4|22"},
      {"domain", "evil.example"},
      {"hostname", "c2.evil.example"},
      {"url", "http://evil.example/a.exe"},
      {"md5", "d41d8cd98f00b204e9800998ecf8427e"},
      {"sha1", "da39a3ee5e6b4b0d3255bfef95601890afd80709"},
      {"sha256", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"},
      {"filename", "setup.exe"},
      {"filename|md5", "a.dll|d41d8cd98f00b204e9800998ecf8427e"},
      {"comment", "dropped by macro"},
      {"text", "seen in campaign"},
  };
  const std::vector<std::map<Field, std::string>> expected = {
      {{Field::ip_dst, "10.0.0.1"}},
      {{Field::ip_dst, "23.229.221.200"}, {Field::port, "40"}},
      {{Field::ip_dst, "10.0.0.2"}, {Field::port, "8080"}},
      {{Field::ip_src, "10.0.0.3"}},
      {{Field::ip_src, "10.0.0.4"}, {Field::port, "22"}},
      {{Field::domain, "evil.example"}},
      {{Field::domain, "c2.evil.example"}},
      {{Field::domain, "http://evil.example/a.exe"}},
      {{Field::file_hash, "d41d8cd98f00b204e9800998ecf8427e"}},
      {{Field::file_hash, "da39a3ee5e6b4b0d3255bfef95601890afd80709"}},
      {{Field::file_hash, "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"}},
      {{Field::filename, "setup.exe"}},
      {{Field::filename, "a.dll"}, {Field::file_hash, "d41d8cd98f00b204e9800998ecf8427e"}},
      {{Field::description, "dropped by macro"}},
      {{Field::description, "seen in campaign"}},
  };
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [type, value] : attrs) list.push_back({{"type", type}, {"value", value}});
  const nlohmann::json event = {
      {"Event", {{"info", "Trojanized Adobe Installer"}, {"threat_level_id", "2"}, {"Attribute", list}}}};
  Diagnostics diagnostics;
  const auto records = ingest::parse_misp_events(event.dump(), "misp", diagnostics);
  c.expect(records.size() == attrs.size(), "record count " + std::to_string(records.size()));
  c.expect(diagnostics.empty(), "unexpected reports");
  const std::vector<Field> slots = {Field::ip_dst, Field::ip_src,   Field::port,       Field::domain,
                                    Field::file_hash, Field::filename, Field::description};
  for (std::size_t i = 0; i < std::min(records.size(), expected.size()); ++i)
    for (Field slot : slots) {
      const auto it = expected[i].find(slot);
      const auto got = records[i].get(slot);
      const bool ok = it == expected[i].end() ? !got.has_value() : got == it->second;
      c.expect(ok, attrs[i].first + " -> " + std::string(ingest::field_name(slot)));
    }

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    util::Rng rng(seed);
    auto in = testing::planted_rule(150, seed).records;
    for (std::size_t i = 0; i < 30; ++i) in.push_back(in[util::uniform_index(rng, in.size())]);  // duplicates
    const auto once = ingest::normalize(in, "d");
    const auto twice = ingest::normalize(once.records(), "d");
    c.expect(once.records() == twice.records() && once.fingerprint() == twice.fingerprint(),
             "normalize not idempotent, seed " + std::to_string(seed));
    util::shuffle(std::span<ingest::CtiRecord>(in), rng);
    c.expect(ingest::normalize(in, "d").fingerprint() == once.fingerprint(),
             "fingerprint depends on order, seed " + std::to_string(seed));
  }
  c.note(std::to_string(attrs.size()) + " attribute types, 20 shuffled record sets");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"count-vectorizer-table", 1.0, count_vectorizer_table},
      {"categorical-encoding-table", 1.0, categorical_table},
      {"metric-oracle", 10.0, metric_oracle},
      {"build-count-combinatorics", 1.0, combinatorics},
      {"planted-rule-end-to-end", 60.0, planted_end_to_end},
      {"validation-state-machine", 120.0, algorithm_paths},
      {"confidence-gating", 60.0, confidence_gating},
      {"budget-enforcement", 60.0, budget_enforcement},
      {"learner-oracles", 60.0, learner_oracles},
      {"ingestion-round-trip", 10.0, ingestion_round_trip},
  };
  int failed = 0;
  for (const auto& criterion : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect(elapsed < criterion.limit_seconds,
                 "took " + fmt(elapsed, 2) + "s, limit " + fmt(criterion.limit_seconds, 0) + "s");
    const bool ok = check.ok();
    failed += ok ? 0 : 1;
    std::printf("%s %s (%s; %.2fs)\n", ok ? "PASS" : "FAIL", criterion.name.c_str(), check.summary().c_str(), elapsed);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
