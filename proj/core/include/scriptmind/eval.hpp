#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scriptmind/client.hpp"
#include "scriptmind/csid.hpp"

namespace scriptmind {

enum class ParseMode { strict, recover };
enum class ParseStatus { strict, recovered, failed };

std::string_view to_string(ParseStatus s) noexcept;
ParseStatus parse_parse_status(std::string_view s);

struct Prediction {
  Label label = Label::non_scam;  // meaningless when status == failed
  std::optional<std::string> next_utterance;
  std::optional<std::string> rationale;
  std::string raw;
  ParseStatus status = ParseStatus::failed;
  std::string error;  // why parsing failed
};

/// Parses a detector reply. Throws FailedParse with the reason.
Prediction parse_prediction(std::string_view raw, ParseMode mode);

/// Same as parse_prediction but returns a failed Prediction instead of throwing.
Prediction try_parse_prediction(std::string_view raw, ParseMode mode);

/// First balanced {...} substring, quotes and escapes respected.
std::optional<std::string_view> first_json_object(std::string_view text);

struct DetectionMetrics {
  std::size_t n = 0;
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double accuracy = 0.0;
  double f1 = 0.0;
  double fp_rate = 0.0;  // fp / n
  double fn_rate = 0.0;  // fn / n
};

DetectionMetrics metrics_from_counts(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn);

/// Positive class is scam. Failed parses count as the wrong label.
DetectionMetrics score_detection(std::span<const Prediction> preds, std::span<const Label> golds);

enum class JudgeTarget { next_utterance, rationale };
std::string_view to_string(JudgeTarget t) noexcept;

struct JudgeScore {
  double value = 0.0;  // in [0, 1], multiple of 0.01
  JudgeTarget target = JudgeTarget::next_utterance;
  int attempts = 0;
};

/// Extracts the score from judge output. NonNumericJudgeOutput or OutOfRange.
double parse_judge_output(std::string_view text);

/// Renders the judge prompt, queries, parses. One retry on unusable output.
JudgeScore judge_similarity(ModelClient& judge, std::string_view predicted, std::string_view gold, JudgeTarget target,
                            const PromptTemplates& templates = PromptTemplates::defaults());

struct CorrelationReport {
  double r = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::string pair_name;
};

CorrelationReport pearson(std::span<const double> x, std::span<const double> y, std::string pair_name = {});

struct HumanRating {
  std::string instance_id;
  std::string rater_id;
  int score = 0;                      // 1..7
  std::optional<JudgeTarget> target;  // optional fourth column
};

/// CSV with header instance_id,rater_id,score_1_to_7[,target].
std::vector<HumanRating> read_human_ratings(const std::filesystem::path& path);

/// Mean rescaled rating (v - 1) / 6 per instance, for one target. Ratings
/// without a target column apply to both targets.
std::map<std::string, double> human_scores(std::span<const HumanRating> ratings, JudgeTarget target);

struct EndpointInfo {
  std::string base_url;
  std::string model_name;
  double temperature = 0.0;
};

struct InstanceRecord {
  std::string instance_id;
  Label gold = Label::scam;
  Prediction prediction;
  int attempts = 0;
  std::optional<std::string> query_error;
  std::optional<double> judge_next_utterance;
  std::optional<double> judge_rationale;
  std::vector<std::string> judge_errors;
};

struct JudgeAggregate {
  double scam_mean = 0.0;      // over scam-gold instances
  std::size_t scam_judged = 0;
  double all_mean = 0.0;       // every instance; benign scored 1 if kept benign, else 0
  std::size_t all_judged = 0;
  std::size_t excluded = 0;    // judge failures
};

struct EvaluationReport {
  EndpointInfo model;
  std::optional<EndpointInfo> judge;
  std::uint64_t seed = 0;
  ParseMode mode = ParseMode::strict;
  std::vector<InstanceRecord> records;  // sorted by instance_id
  DetectionMetrics metrics;
  std::size_t failed_parses = 0;
  std::size_t query_errors = 0;
  std::optional<JudgeAggregate> judge_next_utterance;
  std::optional<JudgeAggregate> judge_rationale;
};

struct EvalOptions {
  std::uint64_t seed = 0;
  ParseMode mode = ParseMode::strict;
  unsigned jobs = 1;
  PromptTemplates templates = PromptTemplates::defaults();
};

/// Recomputes every aggregate of `report` from its records.
void aggregate(EvaluationReport& report);

/// Per-instance failures are recorded, never thrown. `judge` may be null.
EvaluationReport evaluate_run(std::span<const CsidInstance> dataset, ModelClient& model, ModelClient* judge,
                              const EvalOptions& options = {});

std::string report_jsonl(const EvaluationReport& report);
std::string aggregate_json(const EvaluationReport& report);
/// Rebuilds records from report_jsonl output (aggregates are recomputed).
EvaluationReport parse_report_jsonl(std::string_view text);

}  // namespace scriptmind
