#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctiv::orchestrator {

enum class Channel { security_team, data_science_team, threat_intel_team };

std::string_view channel_name(Channel channel);

struct Notification {
  std::string timestamp;  // UTC, ISO 8601
  Channel channel = Channel::security_team;
  std::string requirement_key;
  std::string reason;
  std::string message;
};

// Append-only log of notifications, one JSON object per line. Without a
// path the log only keeps records in memory. Thread-safe.
class NotificationLog {
 public:
  NotificationLog() = default;
  explicit NotificationLog(std::filesystem::path path) : path_(std::move(path)) {}

  void notify(Channel channel, std::string requirement_key, std::string reason, std::string message);

  // Records appended through this instance.
  std::vector<Notification> records() const;
  const std::optional<std::filesystem::path>& path() const { return path_; }

  // Parses a log file written by notify(). Throws FormatError on a bad line.
  static std::vector<Notification> read(const std::filesystem::path& path);

 private:
  std::optional<std::filesystem::path> path_;
  mutable std::mutex mutex_;
  std::vector<Notification> records_;
};

}  // namespace ctiv::orchestrator
