// Packaged deterministic endpoints for offline runs and tests.

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "json_util.hpp"
#include "scriptmind/client.hpp"

namespace scriptmind {

namespace {

std::string last_user_message(const std::vector<ChatMessage>& messages) {
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == "user") return it->content;
  }
  return {};
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

constexpr std::array<std::string_view, 10> kKeywords = {"prosecutor", "investigat", "account", "transfer", "warrant",
                                                        "fraud",      "crime",      "bank",    "money",    "safe"};

constexpr std::string_view kRulesMarker = "\n(Follow the rules below.)";

class KeywordMock final : public ChatTransport {
 public:
  ChatReply send(const ModelEndpoint&, const std::vector<ChatMessage>& messages) override {
    auto text = last_user_message(messages);
    if (const auto cut = text.find(kRulesMarker); cut != std::string::npos) text.resize(cut);

    std::set<std::string_view> hits;
    std::string cue;  // last line that mentions a keyword
    std::size_t start = 0;
    while (start <= text.size()) {
      auto end = text.find('\n', start);
      if (end == std::string::npos) end = text.size();
      const auto line = std::string_view(text).substr(start, end - start);
      const auto low = lower_ascii(line);
      bool any = false;
      for (auto k : kKeywords) {
        if (low.find(k) != std::string::npos) {
          hits.insert(k);
          any = true;
        }
      }
      if (any) cue = detail::trim(line);
      start = end + 1;
    }

    detail::ordered_json out;
    if (hits.size() >= 2) {
      out["label"] = "scam";
      out["next_utterance"] = cue;
      out["rationale"] =
          "Current criminal intent: Requesting financial information. Expected next criminal intent: Instructing a "
          "money transfer.";
    } else {
      out["label"] = "non_scam";
    }
    return {200, out.dump(), {}};
  }
};

std::set<std::string> tokens(std::string_view s) {
  std::set<std::string> out;
  std::string cur;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.insert(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.insert(std::move(cur));
  return out;
}

class OverlapJudge final : public ChatTransport {
 public:
  ChatReply send(const ModelEndpoint&, const std::vector<ChatMessage>& messages) override {
    const auto text = last_user_message(messages);
    constexpr std::string_view kPred = "Prediction: ";
    constexpr std::string_view kGold = "\nGround truth: ";
    const auto p = text.rfind(kPred);
    const auto g = text.rfind(kGold);
    if (p == std::string::npos || g == std::string::npos || g < p) return {200, "no comparison found", {}};
    const auto pred = tokens(std::string_view(text).substr(p + kPred.size(), g - p - kPred.size()));
    const auto gold = tokens(std::string_view(text).substr(g + kGold.size()));
    std::size_t common = 0;
    for (const auto& t : pred) common += gold.count(t);
    const std::size_t uni = pred.size() + gold.size() - common;
    const double score = uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
    return {200, fmt::format("{:.2f}", score), {}};
  }
};

class OracleMock final : public ChatTransport {
 public:
  OracleMock(std::span<const CsidInstance> instances, const PromptTemplates& templates) {
    for (const auto& inst : instances) {
      auto r = render_prompt(inst, templates);
      answers_.emplace(std::move(r.user), std::move(r.expected_output));
    }
  }

  ChatReply send(const ModelEndpoint&, const std::vector<ChatMessage>& messages) override {
    const auto it = answers_.find(last_user_message(messages));
    if (it == answers_.end()) return {404, {}, "prompt not in oracle dataset"};
    return {200, it->second, {}};
  }

 private:
  std::unordered_map<std::string, std::string> answers_;
};

}  // namespace

std::shared_ptr<ChatTransport> make_keyword_mock() { return std::make_shared<KeywordMock>(); }
std::shared_ptr<ChatTransport> make_overlap_judge() { return std::make_shared<OverlapJudge>(); }
std::shared_ptr<ChatTransport> make_oracle_mock(std::span<const CsidInstance> instances,
                                                const PromptTemplates& templates) {
  return std::make_shared<OracleMock>(instances, templates);
}

}  // namespace scriptmind
