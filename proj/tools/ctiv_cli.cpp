// Command-line driver: ingest feeds, build and validate requirement models,
// inspect the registry, and print the build-count benchmark.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ctiv/bench/bench.hpp"
#include "ctiv/errors.hpp"
#include "ctiv/ingest/csv_feed.hpp"
#include "ctiv/ingest/dataset.hpp"
#include "ctiv/ingest/enrich.hpp"
#include "ctiv/ingest/misp.hpp"
#include "ctiv/learners/build.hpp"
#include "ctiv/orchestrator/orchestrator.hpp"
#include "ctiv/util/strings.hpp"

namespace fs = std::filesystem;
using namespace ctiv;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kContract = 2,
  kNoData = 3,
  kBelowConfidence = 4,
  kAllTimedOut = 5,
};

struct Common {
  std::string dataset;
  std::string requirement;
  std::optional<double> confidence;
  std::uint64_t seed = 42;
  double budget_seconds = 0.0;
  std::size_t budget_bytes = 0;
  std::size_t parallelism = 1;
  std::string tiers = "required";
  std::size_t trials = 4;
  std::string registry;
};

fs::path registry_root(const Common& c) {
  if (!c.registry.empty()) return c.registry;
  if (const char* env = std::getenv("CTIV_REGISTRY"); env && *env) return env;
  return "ctiv-registry";
}

std::string requirement_text(const std::string& arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) return ingest::read_file(arg);
  std::string text = arg;
  // Inline form: "ob: ob3; un: attack; confidence: 0.6".
  if (!text.empty() && text.front() != '{')
    for (char& ch : text)
      if (ch == ';') ch = '\n';
  return text;
}

learners::BuildOptions build_options(const Common& c) {
  learners::BuildOptions o;
  if (c.tiers == "all") {
    o.tiers = {learners::Tier::required, learners::Tier::optional};
  } else if (c.tiers == "required") {
    o.tiers = {learners::Tier::required};
  } else {
    std::vector<learners::Family> families;
    for (const auto& name : util::split(c.tiers, ',')) families.push_back(learners::parse_family(util::trim(name)));
    o.families = families;
  }
  o.parallelism = std::max<std::size_t>(1, c.parallelism);
  o.n_trials = std::max<std::size_t>(1, c.trials);
  return o;
}

learners::BuildBudget budget_of(const Common& c) { return {c.budget_seconds, c.budget_bytes}; }

void add_common(CLI::App* cmd, Common& c, bool needs_requirement) {
  cmd->add_option("--dataset", c.dataset, "Dataset file written by 'ingest'")->required();
  auto* req = cmd->add_option("--requirement", c.requirement, "Requirement file or inline 'ob: ..; un: ..' text");
  if (needs_requirement) req->required();
  cmd->add_option("--confidence", c.confidence, "Minimum F1 (overrides the requirement)")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--budget-seconds", c.budget_seconds, "Wall-clock budget per candidate build (0: none)");
  cmd->add_option("--budget-bytes", c.budget_bytes, "Estimated memory budget per candidate build (0: none)");
  cmd->add_option("--parallelism", c.parallelism, "Candidate builds run at once");
  cmd->add_option("--algorithms", c.tiers, "'required', 'all', or a comma list of families");
  cmd->add_option("--trials", c.trials, "Tuning trials per candidate");
  cmd->add_option("--registry", c.registry, "Registry root (default: $CTIV_REGISTRY or ./ctiv-registry)");
}

void print_candidates(const orchestrator::BuildReport& report) {
  for (const auto& c : report.candidates) {
    std::fprintf(stderr, "  %-4s %-13s %-9s f1=%.4f %.3fs%s%s\n", std::string(learners::family_name(c.family)).c_str(),
                 std::string(features::scheme_name(c.scheme)).c_str(),
                 std::string(learners::status_name(c.status)).c_str(), c.f1, c.elapsed, c.message.empty() ? "" : " ",
                 c.message.c_str());
  }
}

void print_model(const learners::TrainedModel& m) {
  std::printf("f1\t%.6f\nfamily\t%s\nencoding\t%s\nhyperparameters\t%s\ntrain_time\t%.6f\npredict_time\t%.6f\n"
              "computation_time\t%.6f\n",
              m.f1(), std::string(learners::family_name(m.family)).c_str(),
              std::string(features::scheme_name(m.scheme())).c_str(), learners::describe(m.hyperparameters).c_str(),
              m.timing.train_time(), m.timing.predict_time(), m.timing.computation_time());
}

std::vector<ingest::CtiRecord> read_records(const fs::path& path) {
  const auto text = ingest::read_file(path);
  if (path.extension() == ".json" || path.extension() == ".ndjson") return ingest::records_from_json(text, "alerts");
  return ingest::records_from_csv(text, "alerts");
}

// ---- ingest ----------------------------------------------------------------

struct IngestArgs {
  std::vector<std::string> feeds;
  std::string format = "auto";
  std::string enrichment;
  std::string resolutions;
  std::string dataset_id = "dataset";
  std::string out = "dataset.json";
};

int run_ingest(const IngestArgs& a) {
  Diagnostics diagnostics;
  std::vector<ingest::CtiRecord> records;
  for (const auto& feed : a.feeds) {
    const fs::path path(feed);
    const auto text = ingest::read_file(path);
    std::string format = a.format;
    if (format == "auto") format = path.extension() == ".json" ? "misp" : "website-csv";
    std::vector<ingest::CtiRecord> batch;
    if (format == "misp") {
      batch = ingest::parse_misp_events(text, a.dataset_id, diagnostics, path.filename().string());
    } else if (format == "website-csv") {
      const auto map = ingest::website_feed_column_map();
      const auto rows = ingest::parse_csv_feed(text, path.filename().string(), map, diagnostics);
      batch = ingest::to_cti_records(rows, map, a.dataset_id, diagnostics);
    } else if (format == "records-csv") {
      batch = ingest::records_from_csv(text, a.dataset_id);
    } else if (format == "records-json") {
      batch = ingest::records_from_json(text, a.dataset_id);
    } else {
      throw ConfigError("unknown feed format '" + format + "'");
    }
    records.insert(records.end(), batch.begin(), batch.end());
  }
  if (!a.enrichment.empty()) {
    auto table = ingest::OfflineEnrichmentTable::from_csv(ingest::read_file(a.enrichment));
    if (!a.resolutions.empty()) table.load_resolutions_csv(ingest::read_file(a.resolutions));
    for (std::size_t i = 0; i < records.size(); ++i) records[i] = ingest::enrich(records[i], table, diagnostics, i);
  }
  const auto dataset = ingest::normalize(std::move(records), a.dataset_id);
  ingest::save_dataset(dataset, a.out);
  for (const auto& r : diagnostics.reports())
    std::fprintf(stderr, "warning: %s[%zu]: %s\n", r.source.c_str(), r.index, r.message.c_str());
  std::printf("records\t%zu\nreports\t%zu\nfingerprint\t%s\n", dataset.size(), diagnostics.size(),
              dataset.fingerprint().c_str());
  return kOk;
}

// ---- build -----------------------------------------------------------------

int run_build(const Common& c) {
  const auto req = orchestrator::interpret(requirement_text(c.requirement), c.confidence, 0.0);
  const auto dataset = ingest::load_dataset(c.dataset);
  orchestrator::ModelRegistry registry(registry_root(c));
  orchestrator::NotificationLog log(registry.root() / "notifications.jsonl");
  const auto key = orchestrator::requirement_key(req, dataset.fingerprint());

  const auto selection = ingest::select_columns(dataset, req.observed, req.unknown);
  if (selection.table.size() < 2) {
    log.notify(orchestrator::Channel::threat_intel_team, key, "no-data", "build requested without usable rows");
    log.notify(orchestrator::Channel::security_team, key, "no-data", "build requested without usable rows");
    std::fprintf(stderr, "no usable rows for this requirement\n");
    return kNoData;
  }
  const auto candidates = learners::build_candidates(selection.table, {key, dataset.fingerprint()}, budget_of(c),
                                                     c.seed, build_options(c));
  orchestrator::BuildReport report;
  for (const auto& cand : candidates)
    report.candidates.push_back(
        {cand.family, cand.scheme, cand.status, cand.model ? cand.model->f1() : 0.0, cand.elapsed, cand.message});
  print_candidates(report);
  auto best = learners::select_optimal(std::span<const learners::Candidate>(candidates));
  if (!best) {
    log.notify(orchestrator::Channel::data_science_team, key, "all-timed-out", "no candidate finished");
    std::fprintf(stderr, "no candidate model finished\n");
    return kAllTimedOut;
  }
  std::printf("key\t%s\n", key.c_str());
  print_model(*best);
  if (best->f1() < req.confidence) {
    log.notify(orchestrator::Channel::data_science_team, key, "below-confidence", "build below requested F1");
    std::fprintf(stderr, "best F1 %.4f is below the requested %.4f; not registered\n", best->f1(), req.confidence);
    return kBelowConfidence;
  }
  const bool stored = registry.register_model(*best);
  std::printf("registered\t%s\n", stored ? "yes" : "no (a better model is stored)");
  return kOk;
}

// ---- validate --------------------------------------------------------------

int run_validate(const Common& c, const std::string& alerts_path, const std::string& out) {
  const auto req = orchestrator::interpret(requirement_text(c.requirement), c.confidence);
  const auto dataset = ingest::load_dataset(c.dataset);
  const auto alerts = read_records(alerts_path);
  orchestrator::ModelRegistry registry(registry_root(c));
  orchestrator::NotificationLog log(registry.root() / "notifications.jsonl");
  orchestrator::Orchestrator orch(registry, log, {build_options(c)});
  const auto outcome = orch.validate(req, alerts, dataset, budget_of(c), c.seed);
  if (outcome.build) print_candidates(*outcome.build);

  if (const auto* p = outcome.as_predicted()) {
    std::string csv = ingest::write_csv_row({"row", std::string(ingest::field_name(req.unknown))}) + "\n";
    for (std::size_t i = 0; i < p->labels.size(); ++i)
      csv += ingest::write_csv_row({std::to_string(i), p->labels[i]}) + "\n";
    if (out.empty()) {
      std::fputs(csv.c_str(), stdout);
    } else {
      std::ofstream f(out, std::ios::binary | std::ios::trunc);
      if (!f) throw StorageError("cannot write " + out);
      f << csv;
    }
    std::fprintf(stderr, "outcome: predicted (%s, f1 %.4f, %s)\n", p->cache_hit ? "cached model" : "new model", p->f1,
                 std::string(learners::family_name(p->model->family)).c_str());
    return kOk;
  }
  const auto* na = outcome.as_not_applicable();
  std::fprintf(stderr, "outcome: not applicable (%s: %s)\n", std::string(orchestrator::reason_name(na->reason)).c_str(),
               na->detail.c_str());
  if (outcome.data_requested) {
    std::string names;
    for (auto f : outcome.data_requested->missing) names += (names.empty() ? "" : ", ") + std::string(ingest::field_name(f));
    std::fprintf(stderr, "data requested: %s\n", names.c_str());
  }
  switch (na->reason) {
    case orchestrator::NotApplicableReason::no_data: return kNoData;
    case orchestrator::NotApplicableReason::below_confidence: return kBelowConfidence;
    case orchestrator::NotApplicableReason::all_timed_out: return kAllTimedOut;
  }
  return kFailure;
}

// ---- registry-list ---------------------------------------------------------

int run_registry_list(const std::string& root_flag, bool as_json) {
  Common c;
  c.registry = root_flag;
  orchestrator::ModelRegistry registry(registry_root(c));
  const auto entries = registry.list();
  if (as_json) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& e : entries)
      doc.push_back({{"key", e.key},
                     {"f1", e.f1},
                     {"family", std::string(learners::family_name(e.family))},
                     {"scheme", std::string(features::scheme_name(e.scheme))},
                     {"directory", e.directory},
                     {"updated_at", e.updated_at}});
    std::printf("%s\n", doc.dump(2).c_str());
    return kOk;
  }
  std::printf("f1\tfamily\tencoding\tkey\n");
  for (const auto& e : entries)
    std::printf("%.4f\t%s\t%s\t%s\n", e.f1, std::string(learners::family_name(e.family)).c_str(),
                std::string(features::scheme_name(e.scheme)).c_str(), e.key.c_str());
  return kOk;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::string plan = "both";
  std::vector<double> samples;
  bool as_json = false;
  std::string out;
};

int run_bench(const BenchArgs& a, const Common& c, bool measure) {
  std::vector<bench::BenchPlan> plans;
  if (a.plan == "website" || a.plan == "both") plans.push_back(bench::website_feed_plan());
  if (a.plan == "misp" || a.plan == "both") plans.push_back(bench::misp_feed_plan());
  if (plans.empty()) throw ConfigError("unknown plan '" + a.plan + "'");

  std::vector<bench::TimingSample> samples;
  for (double s : a.samples) samples.push_back({s, false});
  if (measure) {
    const auto req = orchestrator::interpret(requirement_text(c.requirement), c.confidence, 0.0);
    const auto dataset = ingest::load_dataset(c.dataset);
    const auto selection = ingest::select_columns(dataset, req.observed, req.unknown);
    const auto key = orchestrator::requirement_key(req, dataset.fingerprint());
    for (const auto& cand : learners::build_candidates(selection.table, {key, dataset.fingerprint()}, budget_of(c),
                                                       c.seed, build_options(c)))
      samples.push_back({cand.elapsed, cand.status == learners::CandidateStatus::timed_out});
  }
  if (samples.empty()) throw ContractError("bench needs --sample-seconds or --dataset with --requirement");
  const auto report = bench::bench_report(plans, samples);
  const std::string text = a.as_json ? bench::report_to_json(report).dump(2) + "\n" : bench::report_to_text(report);
  if (a.out.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
    if (!f) throw StorageError("cannot write " + a.out);
    f << text;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threat-data validation: on-demand model building for SOC requirements"};
  app.require_subcommand(1);

  IngestArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand("ingest", "Parse feed files into a normalized dataset");
  ingest_cmd->add_option("--feed", ingest_args.feeds, "Feed file (repeatable)")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--format", ingest_args.format, "auto, website-csv, misp, records-csv or records-json");
  ingest_cmd->add_option("--enrichment", ingest_args.enrichment, "CSV of key,asn,owner,country")
      ->check(CLI::ExistingFile);
  ingest_cmd->add_option("--resolutions", ingest_args.resolutions, "CSV of host,ip")->check(CLI::ExistingFile);
  ingest_cmd->add_option("--dataset-id", ingest_args.dataset_id, "Identifier stored with the dataset");
  ingest_cmd->add_option("--out", ingest_args.out, "Dataset output file");

  Common build_common;
  auto* build_cmd = app.add_subcommand("build", "Build, select and register a model for a requirement");
  add_common(build_cmd, build_common, true);

  Common validate_common;
  std::string alerts, predictions_out;
  auto* validate_cmd = app.add_subcommand("validate", "Predict the unknown attribute of alert rows");
  add_common(validate_cmd, validate_common, true);
  validate_cmd->add_option("--alerts", alerts, "Alert rows (CSV with field-name header, or JSON records)")
      ->required()
      ->check(CLI::ExistingFile);
  validate_cmd->add_option("--out", predictions_out, "Predictions CSV (default: stdout)");

  std::string list_root;
  bool list_json = false;
  auto* list_cmd = app.add_subcommand("registry-list", "List registered models");
  list_cmd->add_option("--registry", list_root, "Registry root (default: $CTIV_REGISTRY or ./ctiv-registry)");
  list_cmd->add_flag("--json", list_json, "Emit JSON");

  BenchArgs bench_args;
  Common bench_common;
  auto* bench_cmd = app.add_subcommand("bench", "Compare prebuild-all and on-demand build counts");
  bench_cmd->add_option("--plan", bench_args.plan, "website, misp or both");
  bench_cmd->add_option("--sample-seconds", bench_args.samples, "Measured build durations (repeatable)");
  bench_cmd->add_option("--dataset", bench_common.dataset, "Measure builds on this dataset");
  bench_cmd->add_option("--requirement", bench_common.requirement, "Requirement for measured builds");
  bench_cmd->add_option("--seed", bench_common.seed, "Random seed");
  bench_cmd->add_option("--budget-seconds", bench_common.budget_seconds, "Budget per measured build");
  bench_cmd->add_option("--parallelism", bench_common.parallelism, "Candidate builds run at once");
  bench_cmd->add_option("--algorithms", bench_common.tiers, "'required', 'all', or a comma list");
  bench_cmd->add_flag("--json", bench_args.as_json, "Emit JSON");
  bench_cmd->add_option("--out", bench_args.out, "Report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kContract;
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest_args);
    if (*build_cmd) return run_build(build_common);
    if (*validate_cmd) return run_validate(validate_common, alerts, predictions_out);
    if (*list_cmd) return run_registry_list(list_root, list_json);
    if (*bench_cmd) {
      const bool measure = !bench_common.dataset.empty() || !bench_common.requirement.empty();
      if (measure && (bench_common.dataset.empty() || bench_common.requirement.empty()))
        throw ContractError("--dataset and --requirement go together");
      return run_bench(bench_args, bench_common, measure);
    }
  } catch (const ContractError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kContract;
  } catch (const UnknownAttributeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kContract;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kFailure;
}
