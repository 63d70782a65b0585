#include "ctiv/bench/bench.hpp"

#include <cstdio>

#include "ctiv/errors.hpp"

namespace ctiv::bench {

using ingest::Field;

std::uint64_t count_feature_combinations(std::size_t n_features) {
  if (n_features < 2) throw ContractError("combination counting needs at least two feature groups");
  if (n_features > 63) throw ContractError("too many feature groups to count in 64 bits");
  return (std::uint64_t{1} << n_features) - 2;
}

void BenchPlan::validate() const {
  if (n_features < 2) throw ContractError("plan '" + name + "' needs at least two feature groups");
  if (n_algorithms == 0 || n_encodings == 0 || n_labels == 0 || requirement_count == 0)
    throw ContractError("plan '" + name + "' has a zero count");
}

std::uint64_t count_experiments(const BenchPlan& plan, Mode mode) {
  plan.validate();
  const std::uint64_t per_set = std::uint64_t{plan.n_algorithms} * plan.n_encodings * plan.n_labels;
  if (mode == Mode::prebuild_all) return count_feature_combinations(plan.n_features) * per_set;
  return std::uint64_t{plan.requirement_count} * per_set;
}

FeatureGroups website_feed_groups() {
  return {{Field::date}, {Field::domain}, {Field::ip_src}, {Field::asn}, {Field::owner}, {Field::country}};
}

FeatureGroups misp_feed_groups() {
  return {{Field::ip_dst},   {Field::port},        {Field::ip_src},  {Field::asn},       {Field::owner},
          {Field::country},  {Field::domain},      {Field::date},    {Field::timestamp}, {Field::description},
          {Field::comment},  {Field::file_hash},   {Field::filename}};
}

BenchPlan website_feed_plan() { return {"website-feed", website_feed_groups().size(), 8, 2, 1, 7}; }

BenchPlan misp_feed_plan() { return {"misp-feed", misp_feed_groups().size(), 8, 2, 4, 11}; }

BenchReport bench_report(std::span<const BenchPlan> plans, std::span<const TimingSample> samples) {
  if (plans.empty()) throw ContractError("bench report needs at least one plan");
  if (samples.empty()) throw ContractError("bench report needs at least one timing sample");
  BenchReport r;
  for (const auto& p : plans) {
    PlanCounts c{p.name, count_experiments(p, Mode::prebuild_all), count_experiments(p, Mode::on_demand)};
    r.prebuild_total += c.prebuild;
    r.on_demand_total += c.on_demand;
    r.plans.push_back(std::move(c));
  }
  r.ratio = static_cast<double>(r.on_demand_total) / static_cast<double>(r.prebuild_total);
  r.savings = 1.0 - r.ratio;
  std::size_t timed_out = 0;
  double total = 0.0;
  for (const auto& s : samples) {
    total += s.seconds;
    timed_out += s.timed_out ? 1 : 0;
  }
  r.samples = samples.size();
  r.mean_seconds = total / static_cast<double>(samples.size());
  r.timed_out_fraction = static_cast<double>(timed_out) / static_cast<double>(samples.size());
  r.prebuild_seconds = r.mean_seconds * static_cast<double>(r.prebuild_total);
  r.on_demand_seconds = r.mean_seconds * static_cast<double>(r.on_demand_total);
  return r;
}

nlohmann::json report_to_json(const BenchReport& r) {
  nlohmann::json plans = nlohmann::json::array();
  for (const auto& p : r.plans)
    plans.push_back({{"name", p.name}, {"prebuild_all", p.prebuild}, {"on_demand", p.on_demand}});
  return {{"format_version", 1},
          {"plans", std::move(plans)},
          {"prebuild_all", r.prebuild_total},
          {"on_demand", r.on_demand_total},
          {"ratio", r.ratio},
          {"savings", r.savings},
          {"samples", r.samples},
          {"mean_build_seconds", r.mean_seconds},
          {"timed_out_fraction", r.timed_out_fraction},
          {"extrapolated_prebuild_seconds", r.prebuild_seconds},
          {"extrapolated_on_demand_seconds", r.on_demand_seconds}};
}

std::string report_to_text(const BenchReport& r) {
  std::string out = "plan\tprebuild_all\ton_demand\n";
  char line[256];
  for (const auto& p : r.plans) {
    std::snprintf(line, sizeof(line), "%s\t%llu\t%llu\n", p.name.c_str(),
                  static_cast<unsigned long long>(p.prebuild), static_cast<unsigned long long>(p.on_demand));
    out += line;
  }
  std::snprintf(line, sizeof(line),
                "total\t%llu\t%llu\nratio\t%.6f\nsavings\t%.6f\nsamples\t%zu\nmean_build_seconds\t%.6f\n"
                "timed_out_fraction\t%.6f\nextrapolated_prebuild_seconds\t%.3f\nextrapolated_on_demand_seconds\t%.3f\n",
                static_cast<unsigned long long>(r.prebuild_total), static_cast<unsigned long long>(r.on_demand_total),
                r.ratio, r.savings, r.samples, r.mean_seconds, r.timed_out_fraction, r.prebuild_seconds,
                r.on_demand_seconds);
  out += line;
  return out;
}

}  // namespace ctiv::bench
