#include <cmath>
#include <regex>

#include "json_util.hpp"
#include "scriptmind/error.hpp"
#include "scriptmind/eval.hpp"

namespace scriptmind {

std::string_view to_string(JudgeTarget t) noexcept {
  return t == JudgeTarget::next_utterance ? "next_utterance" : "rationale";
}

double parse_judge_output(std::string_view text) {
  static const std::regex number(R"([-+]?(?:\d+(?:\.\d*)?|\.\d+))");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(text.begin(), text.end(), m, number)) {
    throw Error(Errc::NonNumericJudgeOutput, "no number in judge output: '" + detail::trim(text.substr(0, 80)) + "'");
  }
  const double v = std::stod(m.str());
  if (!(v >= 0.0 && v <= 1.0)) throw Error(Errc::OutOfRange, "judge score " + m.str() + " outside [0, 1]");
  return std::round(v * 100.0) / 100.0;
}

JudgeScore judge_similarity(ModelClient& judge, std::string_view predicted, std::string_view gold, JudgeTarget target,
                            const PromptTemplates& templates) {
  if (detail::is_blank(predicted) || detail::is_blank(gold)) {
    throw Error(Errc::EmptyInput, "judge needs non-empty prediction and ground truth");
  }
  const std::string_view target_name = target == JudgeTarget::next_utterance ? "next utterance" : "rationale";
  const auto prompt = substitute(templates.judge, {{"target", target_name},
                                                   {"prediction", predicted},
                                                   {"ground_truth", gold}});
  const std::vector<ChatMessage> messages{{"user", prompt}};
  JudgeScore score;
  score.target = target;
  for (int round = 1;; ++round) {
    const auto reply = judge.query(messages);
    score.attempts += reply.attempts;
    try {
      score.value = parse_judge_output(reply.text);
      return score;
    } catch (const Error&) {
      if (round == 2) throw;
    }
  }
}

}  // namespace scriptmind
