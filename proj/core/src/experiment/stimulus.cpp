#include <fmt/format.h>

#include "json_util.hpp"
#include "scriptmind/error.hpp"
#include "scriptmind/experiment/session.hpp"

namespace scriptmind::experiment {

using detail::json;

std::string_view to_string(AgeBand b) noexcept {
  switch (b) {
    case AgeBand::twenties: return "20s";
    case AgeBand::thirties: return "30s";
    case AgeBand::forties: return "40s";
    case AgeBand::fifties: return "50s";
  }
  return "20s";
}

std::string_view to_string(Condition c) noexcept {
  switch (c) {
    case Condition::control: return "control";
    case Condition::single_warning: return "single_warning";
    case Condition::scriptmind: return "scriptmind";
  }
  return "control";
}

std::string_view to_string(WarningKind k) noexcept {
  return k == WarningKind::alert_banner ? "alert_banner" : "predicted_utterance";
}

std::optional<AgeBand> parse_age_band(std::string_view s) noexcept {
  for (auto b : kAgeBands) {
    if (to_string(b) == s) return b;
  }
  return std::nullopt;
}

std::optional<Condition> parse_condition(std::string_view s) noexcept {
  for (auto c : kConditions) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

std::size_t StimulusScript::utterance_count() const {
  std::size_t n = 0;
  for (const auto& s : stages) n += s.utterances.size();
  return n;
}

void StimulusScript::validate() const {
  if (stages.size() != kStageCount) {
    throw Error(Errc::ConfigError, fmt::format("script has {} stages, expected {}", stages.size(), kStageCount));
  }
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const auto where = fmt::format("stage {}", i + 1);
    if (s.index != static_cast<int>(i) + 1) throw Error(Errc::ConfigError, "stages must be indexed 1..5 in order", where);
    if (s.utterances.size() < 4 || s.utterances.size() > 12) {
      throw Error(Errc::ConfigError, fmt::format("{} utterances, expected 4..12", s.utterances.size()), where);
    }
    for (const auto& u : s.utterances) {
      if (detail::is_blank(u)) throw Error(Errc::ConfigError, "blank utterance", where);
    }
  }
}

StimulusScript StimulusScript::load(const std::filesystem::path& path) {
  const auto where = path.string();
  StimulusScript script;
  try {
    const auto doc = json::parse(detail::read_file(path));
    script.instruction = doc.value("instruction", std::string{});
    for (const auto& st : doc.at("stages")) {
      Stage s;
      s.index = st.at("index").get<int>();
      s.name = st.at("name").get<std::string>();
      s.utterances = st.at("utterances").get<std::vector<std::string>>();
      if (st.contains("audio_url") && !st.at("audio_url").is_null()) s.audio_url = st.at("audio_url").get<std::string>();
      script.stages.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, e.what(), where);
  }
  script.validate();
  return script;
}

void WarningContent::validate() const {
  if (alert_stage < 1 || alert_stage > kStageCount) throw Error(Errc::ConfigError, "alert stage must be in 1..5");
  if (detail::is_blank(alert_text)) throw Error(Errc::ConfigError, "alert text is blank");
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (detail::is_blank(predictions[i])) {
      throw Error(Errc::ConfigError, "missing predicted utterance", fmt::format("stage {}", i + 1));
    }
  }
}

WarningContent WarningContent::load(const std::filesystem::path& path) {
  WarningContent w;
  try {
    const auto doc = json::parse(detail::read_file(path));
    const auto& banner = doc.at("alert_banner");
    w.alert_stage = banner.at("stage").get<int>();
    w.alert_text = banner.at("content").get<std::string>();
    w.alert_audio_cue = banner.value("audio_cue", true);
    const auto& pred = doc.at("predicted_utterances");
    w.prediction_audio_cue = pred.value("audio_cue", true);
    const auto& by_stage = pred.at("by_stage");
    for (int s = 1; s <= kStageCount; ++s) {
      w.predictions[s - 1] = by_stage.at(std::to_string(s)).get<std::string>();
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, e.what(), path.string());
  }
  w.validate();
  return w;
}

std::vector<WarningEvent> warnings_for(Condition c, int stage, const WarningContent& content) {
  switch (c) {
    case Condition::control: return {};
    case Condition::single_warning:
      if (stage == content.alert_stage) {
        return {WarningEvent{stage, WarningKind::alert_banner, content.alert_text, content.alert_audio_cue}};
      }
      return {};
    case Condition::scriptmind:
      return {WarningEvent{stage, WarningKind::predicted_utterance, content.predictions.at(stage - 1),
                           content.prediction_audio_cue}};
  }
  return {};
}

}  // namespace scriptmind::experiment
