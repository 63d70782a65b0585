#include "ctiv/orchestrator/registry.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ctiv/errors.hpp"
#include "ctiv/util/civil_time.hpp"
#include "ctiv/util/hash.hpp"

namespace ctiv::orchestrator {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void write_atomically(const fs::path& path, const std::string& bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + tmp.string());
    out << bytes;
    out.flush();
    if (!out) throw StorageError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StorageError("cannot replace " + path.string() + ": " + ec.message());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::size_t BuildReport::count(learners::CandidateStatus status) const {
  std::size_t n = 0;
  for (const auto& c : candidates) n += c.status == status ? 1 : 0;
  return n;
}

std::string ModelRegistry::directory_for(const std::string& key) { return util::sha256_hex(key).substr(0, 32); }

ModelRegistry::ModelRegistry(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw StorageError("cannot create registry root " + root_.string() + ": " + ec.message());
  const auto index = root_ / "index.json";
  if (!fs::exists(index)) return;
  try {
    const auto doc = json::parse(read_file(index));
    if (doc.at("format_version").get<int>() != kFormatVersion)
      throw StorageError("unsupported registry index version in " + index.string());
    for (const auto& e : doc.at("entries")) {
      RegistryEntry entry;
      entry.key = e.at("key").get<std::string>();
      entry.directory = e.at("directory").get<std::string>();
      entry.f1 = e.at("f1").get<double>();
      entry.family = learners::parse_family(e.at("family").get<std::string>());
      entry.scheme = features::parse_scheme(e.at("scheme").get<std::string>());
      entry.created_at = e.at("created_at").get<std::string>();
      entry.updated_at = e.at("updated_at").get<std::string>();
      entries_[entry.key] = std::move(entry);
    }
  } catch (const json::exception& e) {
    throw StorageError("corrupt registry index " + index.string() + ": " + e.what());
  } catch (const Error& e) {
    throw StorageError("corrupt registry index " + index.string() + ": " + e.what());
  }
}

void ModelRegistry::write_index_locked() const {
  json entries = json::array();
  for (const auto& [key, e] : entries_) {
    entries.push_back({{"key", e.key},
                       {"directory", e.directory},
                       {"f1", e.f1},
                       {"family", std::string(learners::family_name(e.family))},
                       {"scheme", std::string(features::scheme_name(e.scheme))},
                       {"created_at", e.created_at},
                       {"updated_at", e.updated_at}});
  }
  const json doc = {{"format_version", kFormatVersion}, {"entries", std::move(entries)}};
  write_atomically(root_ / "index.json", doc.dump(2) + "\n");
}

bool ModelRegistry::register_model(const learners::TrainedModel& model) {
  return register_model(std::make_shared<const learners::TrainedModel>(model));
}

bool ModelRegistry::register_model(std::shared_ptr<const learners::TrainedModel> model) {
  if (!model || model->requirement_key.empty()) throw ContractError("model has no requirement key");
  const std::string& key = model->requirement_key;
  std::unique_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it != entries_.end() && model->f1() < it->second.f1) return false;

  RegistryEntry entry;
  entry.key = key;
  entry.directory = directory_for(key);
  entry.f1 = model->f1();
  entry.family = model->family;
  entry.scheme = model->scheme();
  entry.updated_at = util::utc_now_iso8601();
  entry.created_at = it != entries_.end() ? it->second.created_at : entry.updated_at;

  const fs::path dir = root_ / entry.directory;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw StorageError("cannot create " + dir.string() + ": " + ec.message());
  write_atomically(dir / "model.json", learners::model_to_json(*model));
  const json manifest = {{"format_version", kFormatVersion},
                         {"key", key},
                         {"f1", entry.f1},
                         {"family", std::string(learners::family_name(entry.family))},
                         {"scheme", std::string(features::scheme_name(entry.scheme))},
                         {"hyperparameters", model->hyperparameters},
                         {"dataset_fingerprint", model->dataset_fingerprint},
                         {"created_at", entry.created_at},
                         {"updated_at", entry.updated_at}};
  write_atomically(dir / "manifest.json", manifest.dump(2) + "\n");

  const RegistryEntry previous = it != entries_.end() ? it->second : RegistryEntry{};
  const bool existed = it != entries_.end();
  entries_[key] = entry;
  try {
    write_index_locked();
  } catch (...) {
    if (existed) {
      entries_[key] = previous;
    } else {
      entries_.erase(key);
    }
    throw;
  }
  std::lock_guard cache_lock(cache_mutex_);
  cache_[key] = std::move(model);
  return true;
}

std::shared_ptr<const learners::TrainedModel> ModelRegistry::load_entry(const RegistryEntry& entry) const {
  const fs::path path = root_ / entry.directory / "model.json";
  try {
    return std::make_shared<const learners::TrainedModel>(learners::load_model(path));
  } catch (const StorageError&) {
    throw;
  } catch (const Error& e) {
    throw StorageError("cannot load model " + path.string() + ": " + e.what());
  }
}

std::shared_ptr<const learners::TrainedModel> ModelRegistry::lookup(const std::string& key, double confidence) const {
  RegistryEntry entry;
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end() || it->second.f1 < confidence) return nullptr;
    entry = it->second;
  }
  {
    std::lock_guard cache_lock(cache_mutex_);
    auto c = cache_.find(key);
    if (c != cache_.end() && c->second->f1() == entry.f1) return c->second;
  }
  auto model = load_entry(entry);
  std::lock_guard cache_lock(cache_mutex_);
  auto& slot = cache_[key];
  if (!slot || slot->f1() != entry.f1) slot = model;
  return slot;
}

std::vector<RegistryEntry> ModelRegistry::list() const {
  std::shared_lock lock(mutex_);
  std::vector<RegistryEntry> out;
  for (const auto& [key, e] : entries_) out.push_back(e);
  return out;
}

std::size_t ModelRegistry::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::shared_ptr<const BuildReport> ModelRegistry::build_once(
    const std::string& key, const std::function<std::shared_ptr<const BuildReport>()>& recheck,
    const std::function<BuildReport()>& build) {
  std::promise<std::shared_ptr<const BuildReport>> promise;
  std::shared_future<std::shared_ptr<const BuildReport>> future;
  bool leader = false;
  {
    std::lock_guard lock(flight_mutex_);
    if (auto it = in_flight_.find(key); it != in_flight_.end()) {
      future = it->second;
    } else {
      if (recheck) {
        if (auto served = recheck()) return served;
      }
      future = promise.get_future().share();
      in_flight_.emplace(key, future);
      ++builds_;
      leader = true;
    }
  }
  if (!leader) return future.get();

  try {
    promise.set_value(std::make_shared<const BuildReport>(build()));
  } catch (...) {
    promise.set_exception(std::current_exception());
  }
  {
    std::lock_guard lock(flight_mutex_);
    in_flight_.erase(key);
  }
  return future.get();
}

}  // namespace ctiv::orchestrator
