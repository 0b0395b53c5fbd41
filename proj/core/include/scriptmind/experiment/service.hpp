#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scriptmind/experiment/session.hpp"

namespace scriptmind::experiment {

/// Append-only JSONL log. Each append is fsync'd before it returns.
class EventLog {
 public:
  /// Opens (creating if needed) the log at `path`. An empty path keeps the
  /// log in memory only.
  explicit EventLog(std::filesystem::path path = {});
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void append(const std::string& json_line);
  /// Lines already present when the log was opened.
  const std::vector<std::string>& existing() const { return existing_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::vector<std::string> existing_;
};

/// Seed recorded by the experiment_started event of an existing log.
std::optional<std::uint64_t> logged_seed(const EventLog& log);

/// UTC ISO-8601 with milliseconds, e.g. 2026-01-02T03:04:05.678Z.
std::string utc_now();

struct ServiceConfig {
  StimulusScript script;
  WarningContent warnings;
  std::uint64_t seed = 0;
  std::function<std::string()> clock = utc_now;
};

/// Session lifecycle over an event log. All mutations are serialized; state
/// is rebuilt from the log on construction.
class ExperimentService {
 public:
  ExperimentService(ServiceConfig config, EventLog& log);

  Session create_session(AgeBand band, bool consent = true);
  /// SessionComplete once all five stages are answered; UnknownSession.
  StimulusBundle next_stimulus(const std::string& session_id);
  /// OutOfOrderStage, LikertOutOfRange, SessionComplete, UnknownSession.
  Session submit_response(const std::string& session_id, const StageResponse& response);

  Session session(const std::string& session_id) const;
  std::vector<Session> snapshot() const;  // sorted by session id
  const ConditionAssigner& assigner() const { return assigner_; }
  const ServiceConfig& config() const { return config_; }

 private:
  void replay();
  StimulusBundle bundle_for(const Session& s) const;

  ServiceConfig config_;
  EventLog& log_;
  mutable std::mutex mu_;
  ConditionAssigner assigner_;
  std::map<std::string, Session> sessions_;
  std::uint64_t created_ = 0;
};

}  // namespace scriptmind::experiment
