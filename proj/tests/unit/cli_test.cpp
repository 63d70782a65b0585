#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ctiv/ingest/dataset.hpp"
#include "fixtures.hpp"

namespace ctiv {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  testing::TempDir dir{"cli"};

  fs::path at(const std::string& name) const { return dir.path() / name; }

  CliRun run(const std::string& args) const {
    const auto out = at("stdout.txt"), err = at("stderr.txt");
    const std::string cmd = std::string("\"") + CTIV_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  std::string registry() const { return " --registry \"" + at("registry").string() + "\""; }

  void write(const std::string& name, const std::string& text) const { std::ofstream(at(name), std::ios::binary) << text; }

  // Website-style feed: the attack label follows a keyword in the domain.
  void write_website_feed(const std::string& name, const std::vector<ingest::CtiRecord>& records) const {
    std::string csv = "Date,Domain,IP,Description,ASN\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      csv += "2019-03-" + std::to_string(1 + i % 28) + "," + *r.get(ingest::Field::domain) + "," +
             *r.get(ingest::Field::ip_src) + "," + *r.get(ingest::Field::attack) + ",AS" + std::to_string(1000 + i % 7) +
             "\n";
    }
    write(name, csv);
  }

  void write_alerts(const std::string& name, const std::vector<ingest::CtiRecord>& records) const {
    std::string csv = "domain,ip_src\n";
    for (const auto& r : records) csv += *r.get(ingest::Field::domain) + "," + *r.get(ingest::Field::ip_src) + "\n";
    write(name, csv);
  }

  fs::path ingest_planted(std::size_t rows, std::uint64_t seed) const {
    write_website_feed("feed.csv", testing::planted_rule(rows, seed).records);
    const auto r = run("ingest --feed \"" + at("feed.csv").string() + "\" --dataset-id web --out \"" +
                       at("dataset.json").string() + "\"");
    EXPECT_EQ(r.code, 0) << r.err;
    return at("dataset.json");
  }

  std::string common(const fs::path& dataset, const std::string& requirement) const {
    return " --dataset \"" + dataset.string() + "\" --requirement \"" + requirement + "\"" + registry();
  }
};

TEST_F(Cli, IngestWritesLoadableDataset) {
  const auto ds_path = ingest_planted(200, 1);
  const auto ds = ingest::load_dataset(ds_path);
  EXPECT_EQ(ds.size(), 200u);
  EXPECT_EQ(ds.id(), "web");
  const auto again = run("ingest --feed \"" + at("feed.csv").string() + "\" --dataset-id web --out \"" +
                         at("dataset2.json").string() + "\"");
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(slurp(ds_path), slurp(at("dataset2.json")));
  EXPECT_NE(again.out.find("records\t200"), std::string::npos) << again.out;
}

TEST_F(Cli, IngestReportsBadRowsAndContinues) {
  write("feed.csv", "Date,Domain,IP,Description,ASN\n2019-03-01,a.paypal.com,10.0.0.1,phishing,AS1\n"
                    "2019-03-02,b.paypal.com,not-an-ip,phishing,AS1\nshort,row\n");
  const auto r = run("ingest --feed \"" + at("feed.csv").string() + "\" --out \"" + at("d.json").string() + "\"");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_GE(ingest::load_dataset(at("d.json")).size(), 1u);
}

TEST_F(Cli, IngestRejectsMissingFile) {
  EXPECT_EQ(run("ingest --feed \"" + at("absent.csv").string() + "\"").code, 2);
  write("broken.json", "{not json");
  EXPECT_EQ(run("ingest --feed \"" + at("broken.json").string() + "\" --out \"" + at("x.json").string() + "\"").code, 1);
}

TEST_F(Cli, BuildRegistersAndListShowsIt) {
  const auto ds = ingest_planted(300, 2);
  const auto r = run("build" + common(ds, "ob: domain; un: attack; confidence: 0.9"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("registered\tyes"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("computation_time"), std::string::npos);

  const auto list = run("registry-list --json" + registry());
  ASSERT_EQ(list.code, 0);
  const auto entries = nlohmann::json::parse(list.out);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_GE(entries[0].at("f1").get<double>(), 0.9);
  EXPECT_EQ(entries[0].at("key").get<std::string>().rfind("ob=domain;un=attack;fp=", 0), 0u);

  const auto table = run("registry-list" + registry());
  EXPECT_NE(table.out.find("ob=domain;un=attack"), std::string::npos);
}

TEST_F(Cli, BuildOnRecordsJsonWithNamedSet) {
  // MISP-style records: nine observed attributes and a threat level that
  // follows the domain keyword.
  const auto rule = testing::planted_rule(300, 3);
  const std::map<std::string, std::string> level = {
      {"phishing", "1"}, {"malware", "2"}, {"botnet", "3"}, {"ransomware", "1"}, {"exploit", "2"}};
  nlohmann::json doc = nlohmann::json::array();
  for (std::size_t i = 0; i < rule.records.size(); ++i) {
    const auto& r = rule.records[i];
    doc.push_back({{"ip_dst", "192.0.2." + std::to_string(i % 200)},
                   {"port", std::to_string(80 + i % 3)},
                   {"ip_src", *r.get(ingest::Field::ip_src)},
                   {"asn", std::to_string(64500 + i % 9)},
                   {"owner", "owner" + std::to_string(i % 4)},
                   {"country", i % 2 ? "US" : "DE"},
                   {"domain", *r.get(ingest::Field::domain)},
                   {"date", "2020-01-0" + std::to_string(1 + i % 9)},
                   {"timestamp", std::to_string(1577836800 + i * 60)},
                   {"threat_level", level.at(*r.get(ingest::Field::attack))}});
  }
  write("events.json", doc.dump());
  auto r = run("ingest --feed \"" + at("events.json").string() + "\" --format records-json --dataset-id misp --out \"" +
               at("misp.json").string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  r = run("build" + common(at("misp.json"), "ob: ob14; un: threat_level; confidence: 0.5"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto list = nlohmann::json::parse(run("registry-list --json" + registry()).out);
  ASSERT_EQ(list.size(), 1u);
  EXPECT_NE(list[0].at("key").get<std::string>().find("un=threat_level"), std::string::npos);
}

TEST_F(Cli, ValidateBuildsThenServesFromRegistry) {
  const auto ds = ingest_planted(300, 4);
  write_alerts("alerts.csv", testing::planted_alerts(testing::planted_rule(300, 4), 40, 5).records);
  const std::string args = "validate" + common(ds, "ob: domain; un: attack; confidence: 0.9") + " --alerts \"" +
                           at("alerts.csv").string() + "\" --out \"";
  const auto first = run(args + at("p1.csv").string() + "\"");
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_NE(first.err.find("new model"), std::string::npos) << first.err;
  const auto second = run(args + at("p2.csv").string() + "\"");
  ASSERT_EQ(second.code, 0) << second.err;
  EXPECT_NE(second.err.find("cached model"), std::string::npos) << second.err;

  const auto p1 = slurp(at("p1.csv"));
  EXPECT_EQ(p1, slurp(at("p2.csv")));
  EXPECT_EQ(p1.rfind("row,attack\n", 0), 0u);
  EXPECT_EQ(std::count(p1.begin(), p1.end(), '\n'), 41);
}

TEST_F(Cli, OutputsAreByteIdenticalAcrossFreshRuns) {
  const auto ds = ingest_planted(300, 6);
  write_alerts("alerts.csv", testing::planted_alerts(testing::planted_rule(300, 6), 20, 7).records);
  std::vector<std::string> outputs;
  for (int i = 0; i < 2; ++i) {
    const std::string reg = " --registry \"" + at("reg" + std::to_string(i)).string() + "\"";
    const auto r = run("validate --dataset \"" + ds.string() +
                       "\" --requirement \"ob: domain, ip_src; un: attack; confidence: 0.5\" --seed 9" + reg +
                       " --alerts \"" + at("alerts.csv").string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    outputs.push_back(r.out);
  }
  EXPECT_EQ(outputs[0], outputs[1]);
}

TEST_F(Cli, ExitCodes) {
  const auto ds = ingest_planted(300, 8);
  write_alerts("alerts.csv", testing::planted_alerts(testing::planted_rule(300, 8), 10, 9).records);
  const std::string alerts = " --alerts \"" + at("alerts.csv").string() + "\"";

  // No rows carry a threat type.
  EXPECT_EQ(run("validate" + common(ds, "ob: domain; un: threat_type; confidence: 0.5") + alerts).code, 3);
  EXPECT_EQ(run("build" + common(ds, "ob: domain; un: threat_type; confidence: 0.5")).code, 3);
  // Every candidate exceeds a one-nanosecond budget.
  EXPECT_EQ(run("validate" + common(ds, "ob: domain; un: attack; confidence: 0.5") + alerts +
                " --budget-seconds 0.000000001")
                .code,
            5);
  // Contract violations.
  EXPECT_EQ(run("validate" + common(ds, "ob: domain; un: domain; confidence: 0.5") + alerts).code, 2);
  EXPECT_EQ(run("validate" + common(ds, "ob: colour; un: attack; confidence: 0.5") + alerts).code, 2);
  EXPECT_EQ(run("build" + common(ds, "ob: domain; un: attack") + " --confidence 1.5").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("--help").code, 0);

  const auto log = slurp(at("registry") / "notifications.jsonl");
  EXPECT_NE(log.find("threat-intel-team"), std::string::npos);
  EXPECT_NE(log.find("data-science-team"), std::string::npos);
}

TEST_F(Cli, BelowConfidenceIsRefused) {
  write_website_feed("noisy.csv", testing::noisy_rule(500, 0.3, 15).records);
  ASSERT_EQ(run("ingest --feed \"" + at("noisy.csv").string() + "\" --out \"" + at("noisy.json").string() + "\"").code, 0);
  write_alerts("alerts.csv", testing::planted_alerts(testing::planted_rule(10, 1), 10, 2).records);
  const auto r = run("validate" + common(at("noisy.json"), "ob: domain; un: attack; confidence: 1.0") +
                     " --seed 2024 --alerts \"" + at("alerts.csv").string() + "\"");
  EXPECT_EQ(r.code, 4) << r.err;
  EXPECT_NE(r.err.find("below-confidence"), std::string::npos) << r.err;
  EXPECT_EQ(run("build" + common(at("noisy.json"), "ob: domain; un: attack; confidence: 1.0")).code, 4);
  EXPECT_EQ(nlohmann::json::parse(run("registry-list --json" + registry()).out).size(), 0u);
}

TEST_F(Cli, RequirementFromFile) {
  const auto ds = ingest_planted(200, 10);
  write("req.json", R"({"ob": "ob2", "un": "attack", "confidence": 0.8})");
  const auto r = run("build" + common(ds, at("req.json").string()));
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, BenchCounts) {
  const auto r = run("bench --json --sample-seconds 2.0");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("on_demand").get<std::uint64_t>(), 816u);
  EXPECT_EQ(j.at("prebuild_all").get<std::uint64_t>(), 992u + 524160u);
  EXPECT_GE(j.at("savings").get<double>(), 0.99);
  EXPECT_DOUBLE_EQ(j.at("extrapolated_on_demand_seconds").get<double>(), 1632.0);

  const auto misp = nlohmann::json::parse(run("bench --json --plan misp --sample-seconds 1").out);
  EXPECT_EQ(misp.at("prebuild_all").get<std::uint64_t>(), 524160u);
  EXPECT_EQ(misp.at("on_demand").get<std::uint64_t>(), 704u);

  EXPECT_EQ(run("bench").code, 2);
  EXPECT_EQ(run("bench --plan nowhere --sample-seconds 1").code, 1);
}

TEST_F(Cli, BenchMeasuresRealBuilds) {
  const auto ds = ingest_planted(200, 11);
  const auto r = run("bench --json --plan website --dataset \"" + ds.string() +
                     "\" --requirement \"ob: domain; un: attack; confidence: 0.5\"");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("samples").get<std::size_t>(), 10u);
  EXPECT_GT(j.at("mean_build_seconds").get<double>(), 0.0);
  EXPECT_EQ(j.at("timed_out_fraction").get<double>(), 0.0);
}

}  // namespace
}  // namespace ctiv
