#include <fmt/format.h>

#include "json_util.hpp"
#include "scriptmind/error.hpp"
#include "scriptmind/experiment/service.hpp"
#include "scriptmind/rng.hpp"

namespace scriptmind::experiment {

using detail::json;
using detail::ordered_json;

namespace {

void check_likert(int v, const char* name, const std::string& where) {
  if (v < 1 || v > 7) throw Error(Errc::LikertOutOfRange, fmt::format("{} = {} outside 1..7", name, v), where);
}

ordered_json response_json(const StageResponse& r) {
  ordered_json j;
  j["stage"] = r.stage;
  j["suspicion"] = r.suspicion;
  j["importance"] = r.importance;
  j["relevance"] = r.relevance;
  j["anxiety"] = r.anxiety;
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

}  // namespace

std::optional<std::uint64_t> logged_seed(const EventLog& log) {
  for (const auto& line : log.existing()) {
    const auto ev = json::parse(line, nullptr, false);
    if (ev.is_object() && ev.value("event", "") == "experiment_started" && ev.contains("seed")) {
      return ev["seed"].get<std::uint64_t>();
    }
  }
  return std::nullopt;
}

ExperimentService::ExperimentService(ServiceConfig config, EventLog& log)
    : config_(std::move(config)), log_(log), assigner_(config_.seed) {
  config_.script.validate();
  config_.warnings.validate();
  if (!config_.clock) config_.clock = utc_now;
  replay();
}

void ExperimentService::replay() {
  const auto& lines = log_.existing();
  bool started = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto where = detail::location(log_.path().string(), i + 1);
    json ev;
    try {
      ev = json::parse(lines[i]);
    } catch (const json::parse_error&) {
      if (i + 1 == lines.size()) break;  // torn final write, never acknowledged
      throw Error(Errc::MalformedLine, "unreadable event", where);
    }
    try {
      const auto kind = ev.at("event").get<std::string>();
      if (kind == "experiment_started") {
        const auto seed = ev.at("seed").get<std::uint64_t>();
        if (seed != config_.seed) {
          throw Error(Errc::ConfigError, fmt::format("log was started with seed {}, not {}", seed, config_.seed),
                      where);
        }
        started = true;
      } else if (kind == "session_created") {
        Session s;
        s.session_id = ev.at("session_id").get<std::string>();
        const auto band = parse_age_band(ev.at("age_band").get<std::string>());
        const auto cond = parse_condition(ev.at("condition").get<std::string>());
        if (!band || !cond) throw Error(Errc::MalformedLine, "bad age band or condition", where);
        s.age_band = *band;
        s.condition = *cond;
        s.consent = ev.value("consent", true);
        s.created_at = ev.at("ts").get<std::string>();
        assigner_.record(s.age_band, s.condition);
        ++created_;
        sessions_[s.session_id] = std::move(s);
      } else if (kind == "response_submitted") {
        auto it = sessions_.find(ev.at("session_id").get<std::string>());
        if (it == sessions_.end()) throw Error(Errc::UnknownSession, "response for unknown session", where);
        const auto& r = ev.at("response");
        StageResponse resp{r.at("stage").get<int>(),     r.at("suspicion").get<int>(), r.at("importance").get<int>(),
                           r.at("relevance").get<int>(), r.at("anxiety").get<int>(),   r.at("elapsed_ms").get<std::int64_t>()};
        auto& s = it->second;
        if (resp.stage != s.stage_cursor + 1) throw Error(Errc::OutOfOrderStage, "log replays out of order", where);
        s.responses.push_back(resp);
        ++s.stage_cursor;
        if (s.completed()) s.completed_at = ev.at("ts").get<std::string>();
      } else if (kind != "stimulus_served") {
        throw Error(Errc::MalformedLine, "unknown event '" + kind + "'", where);
      }
    } catch (const json::exception& e) {
      throw Error(Errc::MalformedLine, e.what(), where);
    }
  }
  if (!started) {
    if (!lines.empty()) throw Error(Errc::MalformedLine, "log does not begin with experiment_started", log_.path().string());
    ordered_json ev;
    ev["event"] = "experiment_started";
    ev["ts"] = config_.clock();
    ev["seed"] = config_.seed;
    log_.append(ev.dump());
  }
}

Session ExperimentService::create_session(AgeBand band, bool consent) {
  std::lock_guard lock(mu_);
  Session s;
  s.session_id = fmt::format("s{:016x}", mix_seed(config_.seed ^ 0x5e55105ULL, created_));
  s.age_band = band;
  s.consent = consent;
  s.created_at = config_.clock();

  // Decide without committing, so a failed append leaves no trace.
  ConditionAssigner trial = assigner_;
  s.condition = trial.assign(band);

  ordered_json ev;
  ev["event"] = "session_created";
  ev["ts"] = s.created_at;
  ev["session_id"] = s.session_id;
  ev["age_band"] = to_string(band);
  ev["condition"] = to_string(s.condition);
  ev["consent"] = consent;
  log_.append(ev.dump());

  assigner_ = trial;
  ++created_;
  sessions_[s.session_id] = s;
  return s;
}

StimulusBundle ExperimentService::bundle_for(const Session& s) const {
  const int stage = s.stage_cursor + 1;
  const auto& st = config_.script.stages.at(static_cast<std::size_t>(stage - 1));
  return StimulusBundle{stage, st.name, st.utterances, st.audio_url,
                        warnings_for(s.condition, stage, config_.warnings)};
}

StimulusBundle ExperimentService::next_stimulus(const std::string& session_id) {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(Errc::UnknownSession, "no such session", session_id);
  const auto& s = it->second;
  if (s.completed()) throw Error(Errc::SessionComplete, "all stages answered", session_id);
  auto bundle = bundle_for(s);
  ordered_json ev;
  ev["event"] = "stimulus_served";
  ev["ts"] = config_.clock();
  ev["session_id"] = session_id;
  ev["stage"] = bundle.stage;
  log_.append(ev.dump());
  return bundle;
}

Session ExperimentService::submit_response(const std::string& session_id, const StageResponse& response) {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(Errc::UnknownSession, "no such session", session_id);
  auto& s = it->second;
  if (s.completed()) throw Error(Errc::SessionComplete, "all stages answered", session_id);
  if (response.stage != s.stage_cursor + 1) {
    throw Error(Errc::OutOfOrderStage,
                fmt::format("response for stage {} while stage {} is due", response.stage, s.stage_cursor + 1),
                session_id);
  }
  check_likert(response.suspicion, "suspicion", session_id);
  check_likert(response.importance, "importance", session_id);
  check_likert(response.relevance, "relevance", session_id);
  check_likert(response.anxiety, "anxiety", session_id);
  if (response.elapsed_ms < 0) throw Error(Errc::InvalidArgument, "elapsed_ms is negative", session_id);

  const auto ts = config_.clock();
  ordered_json ev;
  ev["event"] = "response_submitted";
  ev["ts"] = ts;
  ev["session_id"] = session_id;
  ev["response"] = response_json(response);
  log_.append(ev.dump());

  s.responses.push_back(response);
  ++s.stage_cursor;
  if (s.completed()) s.completed_at = ts;
  return s;
}

Session ExperimentService::session(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(Errc::UnknownSession, "no such session", session_id);
  return it->second;
}

std::vector<Session> ExperimentService::snapshot() const {
  std::lock_guard lock(mu_);
  std::vector<Session> out;
  out.reserve(sessions_.size());
  for (const auto& [id, s] : sessions_) out.push_back(s);
  return out;
}

}  // namespace scriptmind::experiment
