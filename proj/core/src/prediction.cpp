#include <array>

#include "json_util.hpp"
#include "scriptmind/error.hpp"
#include "scriptmind/eval.hpp"

namespace scriptmind {

std::string_view to_string(ParseStatus s) noexcept {
  switch (s) {
    case ParseStatus::strict: return "strict";
    case ParseStatus::recovered: return "recovered";
    case ParseStatus::failed: return "failed";
  }
  return "failed";
}

ParseStatus parse_parse_status(std::string_view s) {
  if (s == "strict") return ParseStatus::strict;
  if (s == "recovered") return ParseStatus::recovered;
  if (s == "failed") return ParseStatus::failed;
  throw Error(Errc::MalformedLine, "unknown parse status '" + std::string(s) + "'");
}

std::optional<std::string_view> first_json_object(std::string_view text) {
  for (auto start = text.find('{'); start != std::string_view::npos; start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) return text.substr(start, i - start + 1);
      }
    }
  }
  return std::nullopt;
}

namespace {

constexpr std::array<std::string_view, 3> kAllowedKeys = {"label", "next_utterance", "rationale"};

[[noreturn]] void fail(const std::string& why) { throw Error(Errc::FailedParse, why); }

Prediction validate(std::string_view object_text, bool require_fields) {
  detail::json doc;
  try {
    doc = detail::json::parse(object_text);
  } catch (const detail::json::parse_error&) {
    fail("not valid JSON");
  }
  if (!doc.is_object()) fail("not a JSON object");
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (auto k : kAllowedKeys) known = known || key == k;
    if (!known) fail("unexpected key '" + key + "'");
  }
  const auto it = doc.find("label");
  if (it == doc.end() || !it->is_string()) fail("missing string field 'label'");
  const auto label = parse_label(it->get<std::string>());
  if (!label) fail("label must be 'scam' or 'non_scam'");

  Prediction p;
  p.label = *label;
  for (auto [key, slot] : {std::pair{"next_utterance", &p.next_utterance}, std::pair{"rationale", &p.rationale}}) {
    const auto f = doc.find(key);
    if (f == doc.end() || f->is_null()) continue;
    if (!f->is_string()) fail(std::string("field '") + key + "' must be a string");
    *slot = f->get<std::string>();
  }
  if (require_fields && p.label == Label::scam) {
    if (!p.next_utterance || detail::is_blank(*p.next_utterance)) fail("scam output without next_utterance");
    if (!p.rationale || detail::is_blank(*p.rationale)) fail("scam output without rationale");
  }
  return p;
}

}  // namespace

Prediction parse_prediction(std::string_view raw, ParseMode mode) {
  const std::string trimmed = detail::trim(raw);
  try {
    auto p = validate(trimmed, true);
    p.raw = std::string(raw);
    p.status = ParseStatus::strict;
    return p;
  } catch (const Error&) {
    if (mode == ParseMode::strict) throw;
  }
  const auto object = first_json_object(raw);
  if (!object) fail("no JSON object found");
  auto p = validate(*object, false);
  p.raw = std::string(raw);
  p.status = ParseStatus::recovered;
  return p;
}

Prediction try_parse_prediction(std::string_view raw, ParseMode mode) {
  try {
    return parse_prediction(raw, mode);
  } catch (const Error& e) {
    Prediction p;
    p.raw = std::string(raw);
    p.status = ParseStatus::failed;
    p.error = e.detail();
    return p;
  }
}

}  // namespace scriptmind
