#include "scriptmind/prompt.hpp"

#include <cstdlib>

#include "json_util.hpp"

#ifndef SCRIPTMIND_DEFAULT_RESOURCE_DIR
#define SCRIPTMIND_DEFAULT_RESOURCE_DIR "resources"
#endif

namespace scriptmind {

namespace {

constexpr std::string_view kSystem =
    "You are an expert in detecting Korean phone scam conversations. Your output must strictly be "
    "a single JSON object. (No extra text outside the defined format.)";

constexpr std::string_view kUser =
    "{conversation}\n"
    "(Follow the rules below.)\n"
    "- If the conversation is phone scam, set label:\"scam\" and fill in next_utterance and rationale.\n"
    "- If it is not scam, return only {\"label\":\"non_scam\"}.\n"
    "\n"
    "Example output (for a scam case):\n"
    "{\n"
    "  \"label\": \"scam\",\n"
    "  \"next_utterance\": \"Predicted next utterance of the scammer (1-2 sentences)\",\n"
    "  \"rationale\": \"Current criminal intent: ... . Expected next criminal intent: ... . Evidence: ...\"\n"
    "}\n"
    "\n"
    "Task: Analyze the given conversation and return the result as JSON.\n"
    "OUTPUT MUST BE VALID JSON. NO EXTRA TEXT.";

constexpr std::string_view kRationale = "Current criminal intent: {current}. Expected next criminal intent: {next}.";

constexpr std::string_view kJudge =
    "You are an expert evaluator for phone scam scenario predictions. Your task is to compare the "
    "model's predicted {target} with the correct ground truth {target}. Rate the prediction STRICTLY "
    "based on whether it conveys the same phishing situation or meaning as the ground truth, not "
    "merely based on text similarity.\n"
    "\n"
    "Give a score between 0.00 and 1.00 (two decimal places):\n"
    "- 1.00 means the prediction fully matches the meaning and intent of the ground truth (same "
    "phishing situation described).\n"
    "- 0.00 means the prediction is completely different or unrelated.\n"
    "- Intermediate values (e.g., 0.45, 0.72) represent partial semantic overlap or situational "
    "similarity.\n"
    "\n"
    "Output only the numeric score, no explanation.\n"
    "\n"
    "Prediction: {prediction}\n"
    "Ground truth: {ground_truth}";

void override_from(const std::filesystem::path& dir, const char* name, std::string& slot) {
  const auto path = dir / name;
  if (!std::filesystem::exists(path)) return;
  auto text = detail::read_file(path);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  slot = std::move(text);
}

}  // namespace

PromptTemplates PromptTemplates::defaults() {
  return PromptTemplates{std::string(kSystem), std::string(kUser), std::string(kRationale),
                         std::string(kJudge)};
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  auto t = defaults();
  override_from(dir, "system.txt", t.system);
  override_from(dir, "user.txt", t.user);
  override_from(dir, "rationale.txt", t.rationale);
  override_from(dir, "judge.txt", t.judge);
  return t;
}

std::string substitute(std::string_view tmpl, Substitutions values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) break;
    out.append(tmpl.substr(pos, open - pos));
    bool replaced = false;
    for (const auto& [key, value] : values) {
      if (tmpl.compare(open + 1, key.size(), key) == 0 && open + 1 + key.size() < tmpl.size() &&
          tmpl[open + 1 + key.size()] == '}') {
        out.append(value);
        pos = open + key.size() + 2;
        replaced = true;
        break;
      }
    }
    if (!replaced) {
      out.push_back('{');
      pos = open + 1;
    }
  }
  if (pos < tmpl.size()) out.append(tmpl.substr(pos));
  return out;
}

std::filesystem::path resource_dir() {
  if (const char* env = std::getenv("SCRIPTMIND_RESOURCES"); env != nullptr && *env != '\0') {
    return env;
  }
  return SCRIPTMIND_DEFAULT_RESOURCE_DIR;
}

}  // namespace scriptmind
