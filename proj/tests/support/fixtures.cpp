#include "fixtures.hpp"

#include <atomic>
#include <chrono>
#include <random>

#include "ctiv/util/random.hpp"

namespace ctiv::testing {

namespace {

const std::vector<std::pair<std::string, std::string>>& keyword_table() {
  static const std::vector<std::pair<std::string, std::string>> table = {
      {"paypalverify", "phishing"}, {"bankupdate", "phishing"},  {"loaderdrop", "malware"},
      {"stealerbin", "malware"},    {"cncpanel", "botnet"},      {"zombienode", "botnet"},
      {"lockpay", "ransomware"},    {"cryptdecrypt", "ransomware"}, {"exploitkit", "exploit"},
      {"shellcodecdn", "exploit"},
  };
  return table;
}

const char* const kTlds[] = {"com", "net", "org", "info", "ru", "biz"};

std::string noise_word(util::Rng& rng) {
  std::string s;
  const std::size_t len = 6 + util::uniform_index(rng, 5);
  for (std::size_t i = 0; i < len; ++i) s += static_cast<char>('a' + util::uniform_index(rng, 26));
  return s;
}

std::string address(std::size_t i, int block) {
  return std::to_string(block) + "." + std::to_string((i >> 16) & 255) + "." + std::to_string((i >> 8) & 255) + "." +
         std::to_string(i & 255);
}

ingest::CtiRecord make_row(const std::string& keyword, util::Rng& rng, std::size_t index, int block,
                           const std::string& dataset_id) {
  ingest::CtiRecord r{dataset_id};
  r.set(ingest::Field::domain, noise_word(rng) + "." + keyword + "." + kTlds[util::uniform_index(rng, 6)]);
  r.set(ingest::Field::ip_src, address(index, block));
  return r;
}

}  // namespace

std::string PlantedRule::label_for_keyword(const std::string& keyword) const {
  for (std::size_t i = 0; i < keywords.size(); ++i)
    if (keywords[i] == keyword) return labels[i];
  return {};
}

PlantedRule planted_rule(std::size_t rows, std::uint64_t seed, std::string dataset_id) {
  PlantedRule rule;
  for (const auto& [k, l] : keyword_table()) {
    rule.keywords.push_back(k);
    rule.labels.push_back(l);
  }
  util::Rng rng(seed);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t k = util::uniform_index(rng, rule.keywords.size());
    auto r = make_row(rule.keywords[k], rng, i, 10, dataset_id);
    r.set(ingest::Field::attack, rule.labels[k]);
    rule.records.push_back(std::move(r));
  }
  return rule;
}

Alerts planted_alerts(const PlantedRule& rule, std::size_t rows, std::uint64_t seed) {
  Alerts out;
  util::Rng rng(seed);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t k = util::uniform_index(rng, rule.keywords.size());
    out.records.push_back(make_row(rule.keywords[k], rng, i, 172, "alerts"));
    out.truth.push_back(rule.labels[k]);
  }
  return out;
}

PlantedRule noisy_rule(std::size_t rows, double noise, std::uint64_t seed, std::string dataset_id) {
  PlantedRule rule = planted_rule(rows, seed, std::move(dataset_id));
  std::vector<std::string> classes = {"phishing", "malware", "botnet", "ransomware", "exploit"};
  util::Rng rng(util::mix_seed(seed, 99));
  for (auto& r : rule.records) {
    if (util::uniform01(rng) >= noise) continue;
    const std::string current = *r.get(ingest::Field::attack);
    std::string replacement = current;
    while (replacement == current) replacement = classes[util::uniform_index(rng, classes.size())];
    r.set(ingest::Field::attack, replacement);
  }
  return rule;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<unsigned> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = std::filesystem::temp_directory_path() /
          ("ctiv-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace ctiv::testing
