#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace scriptmind::experiment {

inline constexpr int kStageCount = 5;

enum class AgeBand { twenties, thirties, forties, fifties };
enum class Condition { control, single_warning, scriptmind };
enum class WarningKind { alert_banner, predicted_utterance };

inline constexpr std::array<AgeBand, 4> kAgeBands = {AgeBand::twenties, AgeBand::thirties, AgeBand::forties,
                                                     AgeBand::fifties};
inline constexpr std::array<Condition, 3> kConditions = {Condition::control, Condition::single_warning,
                                                         Condition::scriptmind};

std::string_view to_string(AgeBand b) noexcept;  // "20s" .. "50s"
std::string_view to_string(Condition c) noexcept;
std::string_view to_string(WarningKind k) noexcept;
std::optional<AgeBand> parse_age_band(std::string_view s) noexcept;
std::optional<Condition> parse_condition(std::string_view s) noexcept;

struct Stage {
  int index = 0;  // 1-based
  std::string name;
  std::vector<std::string> utterances;
  std::optional<std::string> audio_url;  // passed through untouched
};

struct StimulusScript {
  std::string instruction;  // shown before stage 1
  std::vector<Stage> stages;

  std::size_t utterance_count() const;
  /// Exactly 5 stages indexed 1..5, each with 4..12 non-blank utterances.
  void validate() const;
  /// JSON: {"instruction": str, "stages": [{"index","name","utterances",["audio_url"]}]}.
  static StimulusScript load(const std::filesystem::path& path);
};

struct WarningEvent {
  int stage = 0;
  WarningKind kind = WarningKind::alert_banner;
  std::string content;
  bool audio_cue = false;

  friend bool operator==(const WarningEvent&, const WarningEvent&) = default;
};

/// Warning texts per condition.
struct WarningContent {
  int alert_stage = 4;
  std::string alert_text = "Warning!! This is a scam call";
  bool alert_audio_cue = true;
  std::array<std::string, kStageCount> predictions;  // one per stage
  bool prediction_audio_cue = true;

  void validate() const;
  /// JSON: {"alert_banner": {"stage","content","audio_cue"},
  ///        "predicted_utterances": {"audio_cue", "by_stage": {"1": str, ...}}}.
  static WarningContent load(const std::filesystem::path& path);
};

/// Warnings shown with stage `stage` (1-based) under condition `c`.
std::vector<WarningEvent> warnings_for(Condition c, int stage, const WarningContent& content);

struct StageResponse {
  int stage = 0;
  int suspicion = 0;
  int importance = 0;
  int relevance = 0;
  int anxiety = 0;
  std::int64_t elapsed_ms = 0;

  friend bool operator==(const StageResponse&, const StageResponse&) = default;
};

struct Session {
  std::string session_id;
  AgeBand age_band = AgeBand::twenties;
  Condition condition = Condition::control;
  bool consent = true;
  int stage_cursor = 0;
  std::vector<StageResponse> responses;
  std::string created_at;
  std::optional<std::string> completed_at;

  bool completed() const { return stage_cursor == kStageCount; }
  friend bool operator==(const Session&, const Session&) = default;
};

struct StimulusBundle {
  int stage = 0;
  std::string stage_name;
  std::vector<std::string> utterances;
  std::optional<std::string> audio_url;
  std::vector<WarningEvent> warnings;
};

/// Stratified condition assignment. Within a band the next condition is one
/// with the fewest sessions in that band; ties go to the globally least used
/// condition, then to a seeded draw keyed by (seed, band, arrival index).
class ConditionAssigner {
 public:
  explicit ConditionAssigner(std::uint64_t seed) : seed_(seed) {}

  Condition assign(AgeBand band);
  /// Replays an assignment recorded earlier.
  void record(AgeBand band, Condition c);

  std::size_t count(AgeBand band, Condition c) const;
  std::size_t total(Condition c) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t arrivals_ = 0;
  std::array<std::array<std::size_t, 3>, 4> counts_{};
};

}  // namespace scriptmind::experiment
