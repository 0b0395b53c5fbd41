#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "json_util.hpp"
#include "scriptmind/error.hpp"
#include "scriptmind/eval.hpp"

namespace scriptmind {

namespace {

using detail::json;
using detail::ordered_json;

std::optional<double> judge_one(ModelClient& judge, const Prediction& pred, const std::optional<std::string>& predicted,
                                const std::optional<std::string>& gold, JudgeTarget target,
                                const PromptTemplates& templates, std::vector<std::string>& errors) {
  if (!gold || detail::is_blank(*gold)) {
    errors.push_back(fmt::format("{}: gold text missing", to_string(target)));
    return std::nullopt;
  }
  // Nothing predicted: scored zero without asking the judge.
  if (pred.status == ParseStatus::failed || pred.label != Label::scam || !predicted || detail::is_blank(*predicted)) {
    return 0.0;
  }
  try {
    return judge_similarity(judge, *predicted, *gold, target, templates).value;
  } catch (const Error& e) {
    errors.push_back(fmt::format("{}: {}", to_string(target), e.what()));
    return std::nullopt;
  }
}

InstanceRecord run_instance(const CsidInstance& inst, ModelClient& model, ModelClient* judge,
                            const EvalOptions& options) {
  InstanceRecord rec;
  rec.instance_id = inst.instance_id;
  rec.gold = inst.label;
  try {
    const auto reply = model.query(render_prompt(inst, options.templates));
    rec.attempts = reply.attempts;
    rec.prediction = try_parse_prediction(reply.text, options.mode);
  } catch (const Error& e) {
    rec.query_error = e.what();
    rec.prediction.status = ParseStatus::failed;
    rec.prediction.error = "no model output";
  }
  if (judge != nullptr && inst.label == Label::scam) {
    rec.judge_next_utterance = judge_one(*judge, rec.prediction, rec.prediction.next_utterance, inst.next_utterance,
                                         JudgeTarget::next_utterance, options.templates, rec.judge_errors);
    rec.judge_rationale = judge_one(*judge, rec.prediction, rec.prediction.rationale, inst.rationale,
                                    JudgeTarget::rationale, options.templates, rec.judge_errors);
  }
  return rec;
}

JudgeAggregate judge_aggregate(const std::vector<InstanceRecord>& records, std::optional<double> InstanceRecord::*slot) {
  JudgeAggregate a;
  double scam_sum = 0.0;
  double all_sum = 0.0;
  for (const auto& r : records) {
    if (r.gold == Label::scam) {
      const auto& v = r.*slot;
      if (!v) {
        ++a.excluded;
        continue;
      }
      scam_sum += *v;
      all_sum += *v;
      ++a.scam_judged;
      ++a.all_judged;
    } else {
      const bool kept = r.prediction.status != ParseStatus::failed && r.prediction.label == Label::non_scam;
      all_sum += kept ? 1.0 : 0.0;
      ++a.all_judged;
    }
  }
  if (a.scam_judged) a.scam_mean = scam_sum / static_cast<double>(a.scam_judged);
  if (a.all_judged) a.all_mean = all_sum / static_cast<double>(a.all_judged);
  return a;
}

ordered_json endpoint_json(const EndpointInfo& e) {
  ordered_json j;
  j["base_url"] = e.base_url;
  j["model_name"] = e.model_name;
  j["temperature"] = e.temperature;
  return j;
}

EndpointInfo endpoint_from(const json& j) {
  return {j.at("base_url").get<std::string>(), j.at("model_name").get<std::string>(),
          j.at("temperature").get<double>()};
}

ordered_json judge_json(const JudgeAggregate& a) {
  ordered_json j;
  j["scam_mean"] = a.scam_mean;
  j["scam_judged"] = a.scam_judged;
  j["all_mean"] = a.all_mean;
  j["all_judged"] = a.all_judged;
  j["excluded"] = a.excluded;
  return j;
}

}  // namespace

void aggregate(EvaluationReport& report) {
  std::vector<Prediction> preds;
  std::vector<Label> golds;
  report.failed_parses = 0;
  report.query_errors = 0;
  for (const auto& r : report.records) {
    preds.push_back(r.prediction);
    golds.push_back(r.gold);
    if (r.query_error) {
      ++report.query_errors;
    } else if (r.prediction.status == ParseStatus::failed) {
      ++report.failed_parses;
    }
  }
  report.metrics = score_detection(preds, golds);
  if (report.judge) {
    report.judge_next_utterance = judge_aggregate(report.records, &InstanceRecord::judge_next_utterance);
    report.judge_rationale = judge_aggregate(report.records, &InstanceRecord::judge_rationale);
  } else {
    report.judge_next_utterance.reset();
    report.judge_rationale.reset();
  }
}

EvaluationReport evaluate_run(std::span<const CsidInstance> dataset, ModelClient& model, ModelClient* judge,
                              const EvalOptions& options) {
  if (dataset.empty()) throw Error(Errc::EmptyInput, "evaluation dataset is empty");
  EvaluationReport report;
  const auto& mep = model.endpoint();
  report.model = {mep.base_url, mep.model_name, mep.temperature};
  if (judge != nullptr) {
    const auto& jep = judge->endpoint();
    report.judge = EndpointInfo{jep.base_url, jep.model_name, jep.temperature};
  }
  report.seed = options.seed;
  report.mode = options.mode;
  report.records.resize(dataset.size());

  const unsigned workers = std::clamp<unsigned>(options.jobs, 1, static_cast<unsigned>(dataset.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < dataset.size(); i = next++) {
      report.records[i] = run_instance(dataset[i], model, judge, options);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  std::sort(report.records.begin(), report.records.end(),
            [](const InstanceRecord& a, const InstanceRecord& b) { return a.instance_id < b.instance_id; });
  aggregate(report);
  return report;
}

std::string report_jsonl(const EvaluationReport& report) {
  std::string out;
  ordered_json head;
  head["type"] = "run";
  head["model"] = endpoint_json(report.model);
  head["judge"] = report.judge ? endpoint_json(*report.judge) : ordered_json(nullptr);
  head["seed"] = report.seed;
  head["parse_mode"] = report.mode == ParseMode::strict ? "strict" : "recover";
  out += head.dump();
  out += '\n';
  for (const auto& r : report.records) {
    ordered_json j;
    j["type"] = "instance";
    j["id"] = r.instance_id;
    j["gold"] = to_string(r.gold);
    j["status"] = to_string(r.prediction.status);
    if (r.prediction.status != ParseStatus::failed) j["label"] = to_string(r.prediction.label);
    if (r.prediction.next_utterance) j["next_utterance"] = *r.prediction.next_utterance;
    if (r.prediction.rationale) j["rationale"] = *r.prediction.rationale;
    j["raw"] = r.prediction.raw;
    if (!r.prediction.error.empty()) j["parse_error"] = r.prediction.error;
    j["attempts"] = r.attempts;
    if (r.query_error) j["query_error"] = *r.query_error;
    if (r.judge_next_utterance) j["judge_next_utterance"] = *r.judge_next_utterance;
    if (r.judge_rationale) j["judge_rationale"] = *r.judge_rationale;
    if (!r.judge_errors.empty()) j["judge_errors"] = r.judge_errors;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::string aggregate_json(const EvaluationReport& report) {
  ordered_json j;
  j["model"] = endpoint_json(report.model);
  j["judge_endpoint"] = report.judge ? endpoint_json(*report.judge) : ordered_json(nullptr);
  j["seed"] = report.seed;
  j["parse_mode"] = report.mode == ParseMode::strict ? "strict" : "recover";
  const auto& m = report.metrics;
  ordered_json d;
  d["n"] = m.n;
  d["tp"] = m.tp;
  d["tn"] = m.tn;
  d["fp"] = m.fp;
  d["fn"] = m.fn;
  d["accuracy"] = m.accuracy;
  d["f1"] = m.f1;
  d["fp_rate"] = m.fp_rate;
  d["fn_rate"] = m.fn_rate;
  j["detection"] = d;
  j["failed_parses"] = report.failed_parses;
  j["query_errors"] = report.query_errors;
  if (report.judge_next_utterance && report.judge_rationale) {
    ordered_json js;
    js["next_utterance"] = judge_json(*report.judge_next_utterance);
    js["rationale"] = judge_json(*report.judge_rationale);
    j["judge"] = js;
  } else {
    j["judge"] = nullptr;
  }
  return j.dump(2) + "\n";
}

EvaluationReport parse_report_jsonl(std::string_view text) {
  EvaluationReport report;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool have_head = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank(line)) continue;
    const auto where = detail::location("<report>", lineno);
    try {
      const auto j = json::parse(line);
      const auto type = j.at("type").get<std::string>();
      if (type == "run") {
        report.model = endpoint_from(j.at("model"));
        if (!j.at("judge").is_null()) report.judge = endpoint_from(j.at("judge"));
        report.seed = j.at("seed").get<std::uint64_t>();
        report.mode = j.at("parse_mode").get<std::string>() == "recover" ? ParseMode::recover : ParseMode::strict;
        have_head = true;
        continue;
      }
      if (type != "instance") throw Error(Errc::MalformedLine, "unknown record type", where);
      InstanceRecord r;
      r.instance_id = j.at("id").get<std::string>();
      const auto gold = parse_label(j.at("gold").get<std::string>());
      if (!gold) throw Error(Errc::MalformedLine, "bad gold label", where);
      r.gold = *gold;
      r.prediction.status = parse_parse_status(j.at("status").get<std::string>());
      if (j.contains("label")) {
        const auto l = parse_label(j.at("label").get<std::string>());
        if (!l) throw Error(Errc::MalformedLine, "bad label", where);
        r.prediction.label = *l;
      }
      if (j.contains("next_utterance")) r.prediction.next_utterance = j.at("next_utterance").get<std::string>();
      if (j.contains("rationale")) r.prediction.rationale = j.at("rationale").get<std::string>();
      r.prediction.raw = j.at("raw").get<std::string>();
      if (j.contains("parse_error")) r.prediction.error = j.at("parse_error").get<std::string>();
      r.attempts = j.at("attempts").get<int>();
      if (j.contains("query_error")) r.query_error = j.at("query_error").get<std::string>();
      if (j.contains("judge_next_utterance")) r.judge_next_utterance = j.at("judge_next_utterance").get<double>();
      if (j.contains("judge_rationale")) r.judge_rationale = j.at("judge_rationale").get<double>();
      if (j.contains("judge_errors")) r.judge_errors = j.at("judge_errors").get<std::vector<std::string>>();
      report.records.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(Errc::MalformedLine, e.what(), where);
    }
  }
  if (!have_head) throw Error(Errc::MalformedLine, "report has no run header");
  aggregate(report);
  return report;
}

}  // namespace scriptmind
