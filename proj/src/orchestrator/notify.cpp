#include "ctiv/orchestrator/notify.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "ctiv/errors.hpp"
#include "ctiv/util/civil_time.hpp"

namespace ctiv::orchestrator {

using nlohmann::json;

std::string_view channel_name(Channel channel) {
  switch (channel) {
    case Channel::security_team: return "security-team";
    case Channel::data_science_team: return "data-science-team";
    case Channel::threat_intel_team: return "threat-intel-team";
  }
  return "?";
}

void NotificationLog::notify(Channel channel, std::string requirement_key, std::string reason, std::string message) {
  Notification n{util::utc_now_iso8601(), channel, std::move(requirement_key), std::move(reason), std::move(message)};
  std::lock_guard lock(mutex_);
  if (path_) {
    const json line = {{"timestamp", n.timestamp},
                       {"channel", std::string(channel_name(n.channel))},
                       {"requirement_key", n.requirement_key},
                       {"reason", n.reason},
                       {"message", n.message}};
    std::ofstream out(*path_, std::ios::app | std::ios::binary);
    if (out) out << line.dump() << '\n';
    // Logging must not turn an outcome into an error; a failed append
    // still leaves the in-memory record.
  }
  records_.push_back(std::move(n));
}

std::vector<Notification> NotificationLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::vector<Notification> NotificationLog::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::vector<Notification> out;
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto doc = json::parse(line);
      Notification n;
      n.timestamp = doc.at("timestamp").get<std::string>();
      const auto channel = doc.at("channel").get<std::string>();
      if (channel == "security-team") {
        n.channel = Channel::security_team;
      } else if (channel == "data-science-team") {
        n.channel = Channel::data_science_team;
      } else if (channel == "threat-intel-team") {
        n.channel = Channel::threat_intel_team;
      } else {
        throw FormatError("unknown channel '" + channel + "'");
      }
      n.requirement_key = doc.at("requirement_key").get<std::string>();
      n.reason = doc.at("reason").get<std::string>();
      n.message = doc.at("message").get<std::string>();
      out.push_back(std::move(n));
    } catch (const json::exception& e) {
      throw FormatError("notification log line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace ctiv::orchestrator
