#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ctiv/learners/build.hpp"
#include "ctiv/learners/model.hpp"

namespace ctiv::orchestrator {

struct CandidateSummary {
  learners::Family family;
  features::Scheme scheme;
  learners::CandidateStatus status;
  double f1 = 0.0;
  double elapsed = 0.0;
  std::string message;
};

// What one on-demand build produced.
struct BuildReport {
  std::shared_ptr<const learners::TrainedModel> selected;  // null: nothing fitted
  std::vector<CandidateSummary> candidates;
  bool registered = false;
  // Set when the build was skipped because the registry already held a
  // good enough model by the time this caller got the build slot.
  bool served_from_registry = false;

  std::size_t count(learners::CandidateStatus status) const;
};

struct RegistryEntry {
  std::string key;
  std::string directory;  // relative to the registry root
  double f1 = 0.0;
  learners::Family family = learners::Family::dt;
  features::Scheme scheme = features::Scheme::label_tfidf;
  std::string created_at;
  std::string updated_at;
};

// Persistent RequirementKey -> TrainedModel map. Layout under the root:
//   index.json              every key with f1, family, scheme, timestamps
//   <hash of key>/model.json     model container
//   <hash of key>/manifest.json  key, f1, family, scheme, hyperparameters
// Many concurrent readers, serialized writers. Not safe across processes.
class ModelRegistry {
 public:
  static constexpr int kFormatVersion = 1;

  // Creates the root if needed and loads the index. Throws StorageError.
  explicit ModelRegistry(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Stores the model under model.requirement_key unless a stored model has
  // a higher F1. Returns whether it was stored.
  bool register_model(const learners::TrainedModel& model);
  bool register_model(std::shared_ptr<const learners::TrainedModel> model);

  // Null on a miss, including a stored model whose F1 is below
  // `confidence`.
  std::shared_ptr<const learners::TrainedModel> lookup(const std::string& key, double confidence) const;

  std::vector<RegistryEntry> list() const;
  std::size_t size() const;

  // Single-flight: concurrent callers with the same key share one run of
  // `build`. Before starting a new build, `recheck` runs under the flight
  // lock; a non-null result is returned instead of building.
  std::shared_ptr<const BuildReport> build_once(
      const std::string& key, const std::function<std::shared_ptr<const BuildReport>()>& recheck,
      const std::function<BuildReport()>& build);

  // Builds started through build_once by this instance.
  std::size_t build_count() const { return builds_.load(); }

  static std::string directory_for(const std::string& key);

 private:
  void write_index_locked() const;
  std::shared_ptr<const learners::TrainedModel> load_entry(const RegistryEntry& entry) const;

  std::filesystem::path root_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, RegistryEntry> entries_;
  mutable std::map<std::string, std::shared_ptr<const learners::TrainedModel>> cache_;
  mutable std::mutex cache_mutex_;

  std::mutex flight_mutex_;
  std::map<std::string, std::shared_future<std::shared_ptr<const BuildReport>>> in_flight_;
  std::atomic<std::size_t> builds_{0};
};

}  // namespace ctiv::orchestrator
