#include "scriptmind/corpus.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>

#include "json_util.hpp"
#include "scriptmind/error.hpp"

namespace scriptmind {

using detail::json;

std::string_view to_string(Speaker s) noexcept {
  return s == Speaker::user ? "user" : "scammer";
}

std::string_view to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::prosecutor_impersonation: return "prosecutor_impersonation";
    case Scenario::benign_police_summons: return "benign_police_summons";
    case Scenario::other: return "other";
  }
  return "other";
}

std::string_view to_string(Label l) noexcept { return l == Label::scam ? "scam" : "non_scam"; }

std::optional<Speaker> parse_speaker(std::string_view s) noexcept {
  if (s == "user") return Speaker::user;
  if (s == "scammer") return Speaker::scammer;
  return std::nullopt;
}

std::optional<Scenario> parse_scenario(std::string_view s) noexcept {
  if (s == "prosecutor_impersonation") return Scenario::prosecutor_impersonation;
  if (s == "benign_police_summons") return Scenario::benign_police_summons;
  if (s == "other") return Scenario::other;
  return std::nullopt;
}

std::optional<Label> parse_label(std::string_view s) noexcept {
  if (s == "scam") return Label::scam;
  if (s == "non_scam") return Label::non_scam;
  return std::nullopt;
}

std::string format_code(const IntentCode& code) { return fmt::format("{}-({})", code.stage, code.step); }

// ---------------------------------------------------------------------------
// Taxonomy

Taxonomy::Taxonomy(std::vector<IntentCode> codes) : codes_(std::move(codes)) {
  std::sort(codes_.begin(), codes_.end());
  auto dup = std::adjacent_find(codes_.begin(), codes_.end());
  if (dup != codes_.end()) {
    throw Error(Errc::MalformedRecord, "duplicate taxonomy node " + format_code(*dup));
  }
  for (const auto& c : codes_) {
    if (c.stage < 1 || c.stage > kStageCount || c.step < 1) {
      throw Error(Errc::MalformedRecord, "taxonomy node out of range " + format_code(c));
    }
  }
}

Taxonomy Taxonomy::parse(std::istream& in, std::string_view source) {
  std::vector<IntentCode> codes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank(line)) continue;
    const auto where = detail::location(source, lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::MalformedRecord, e.what(), where);
    }
    IntentCode code;
    code.stage = static_cast<int>(detail::require_int(rec, "stage", where));
    code.step = static_cast<int>(detail::require_int(rec, "step", where));
    code.description = detail::trim(detail::require_string(rec, "description", where));
    codes.push_back(std::move(code));
  }
  return Taxonomy(std::move(codes));
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open taxonomy", path.string());
  return parse(in, path.string());
}

const IntentCode* Taxonomy::find(int stage, int step) const noexcept {
  IntentCode key{stage, step, {}};
  auto it = std::lower_bound(codes_.begin(), codes_.end(), key);
  if (it == codes_.end() || *it != key) return nullptr;
  return &*it;
}

namespace {

// Parses a run of digits at s[pos]; advances pos.
std::optional<int> take_number(std::string_view s, std::size_t& pos) {
  std::size_t start = pos;
  while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
  if (pos == start || pos - start > 6) return std::nullopt;
  int value = 0;
  std::from_chars(s.data() + start, s.data() + pos, value);
  return value;
}

}  // namespace

IntentCode parse_intent_code(std::string_view token, const Taxonomy& taxonomy) {
  const std::string t = detail::trim(token);
  std::string_view s = t;
  std::size_t pos = 0;
  auto stage = take_number(s, pos);
  bool ok = stage.has_value() && pos < s.size() && s[pos] == '-';
  std::optional<int> step;
  if (ok) {
    ++pos;
    const bool paren = pos < s.size() && s[pos] == '(';
    if (paren) ++pos;
    step = take_number(s, pos);
    if (paren) {
      ok = step.has_value() && pos < s.size() && s[pos] == ')';
      ++pos;
    } else {
      ok = step.has_value();
    }
    ok = ok && pos == s.size();
  }
  if (!ok) {
    throw Error(Errc::BadFormat, fmt::format("'{}' is not an intent code like 5-(2)", t));
  }
  const IntentCode* found = taxonomy.find(*stage, *step);
  if (found == nullptr) {
    throw Error(Errc::UnknownCode, fmt::format("'{}' is not in the taxonomy", t));
  }
  return *found;
}

// ---------------------------------------------------------------------------
// Corpus

const ScamCase* Corpus::find_case(std::string_view case_id) const noexcept {
  for (const auto& c : cases) {
    if (c.case_id == case_id) return &c;
  }
  return nullptr;
}

std::vector<SbsRecord> Corpus::sbs_for(std::string_view case_id) const {
  std::vector<SbsRecord> out;
  for (const auto& r : sbs) {
    if (r.case_id == case_id) out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SbsRecord& a, const SbsRecord& b) { return a.turn_index < b.turn_index; });
  return out;
}

bool operator==(const Corpus& a, const Corpus& b) {
  return a.cases == b.cases && a.sbs == b.sbs && a.taxonomy.codes() == b.taxonomy.codes();
}

std::vector<SbsRecord> normalize_sbs(std::span<const RawAnnotation> raw, std::span<const ScamCase> cases) {
  std::map<std::string_view, const ScamCase*> by_id;
  for (const auto& c : cases) by_id.emplace(c.case_id, &c);

  std::vector<SbsRecord> out;
  for (const auto& entry : raw) {
    const auto where = fmt::format("{}#{}", entry.case_id, entry.turn_index);
    auto it = by_id.find(entry.case_id);
    if (it == by_id.end() || entry.turn_index >= it->second->utterances.size()) {
      throw Error(Errc::NonScammerUtterance, "annotation references no utterance", where);
    }
    if (it->second->utterances[entry.turn_index].speaker != Speaker::scammer) {
      throw Error(Errc::NonScammerUtterance, "annotation references a user turn", where);
    }
    bool first = true;
    for (const auto& intent : entry.intents) {
      out.push_back(SbsRecord{entry.case_id, entry.turn_index, intent, first});
      first = false;
    }
  }
  return out;
}

Corpus parse_corpus(std::istream& in, const Taxonomy& taxonomy, std::string_view source) {
  Corpus corpus;
  corpus.taxonomy = taxonomy;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_blank(line)) continue;
    const auto where = detail::location(source, lineno);

    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::MalformedRecord, e.what(), where);
    }

    ScamCase sc;
    sc.case_id = detail::trim(detail::require_string(rec, "case_id", where));
    if (sc.case_id.empty()) throw Error(Errc::MalformedRecord, "empty case_id", where);
    if (!seen.insert(sc.case_id).second) {
      throw Error(Errc::DuplicateCaseId, "case_id '" + sc.case_id + "' repeated", where);
    }

    const auto scenario = parse_scenario(detail::require_string(rec, "scenario", where));
    if (!scenario) throw Error(Errc::MalformedRecord, "unknown scenario", where);
    sc.scenario = *scenario;
    const auto label = parse_label(detail::require_string(rec, "label", where));
    if (!label) throw Error(Errc::MalformedRecord, "unknown label", where);
    sc.label = *label;
    if (sc.label == Label::non_scam && sc.scenario == Scenario::prosecutor_impersonation) {
      throw Error(Errc::MalformedRecord, "non_scam label on a scam scenario", where);
    }

    const json& utts = detail::require(rec, "utterances", where);
    if (!utts.is_array() || utts.empty()) {
      throw Error(Errc::MalformedRecord, "utterances must be a non-empty array", where);
    }
    for (const auto& u : utts) {
      Utterance utt;
      utt.case_id = sc.case_id;
      const auto turn = detail::require_int(u, "turn", where);
      if (turn < 0) throw Error(Errc::MalformedRecord, "negative turn", where);
      utt.turn_index = static_cast<std::size_t>(turn);
      const auto speaker_name = detail::require_string(u, "speaker", where);
      const auto speaker = parse_speaker(speaker_name);
      if (!speaker) {
        throw Error(Errc::UnknownSpeaker, "speaker '" + speaker_name + "'", where);
      }
      utt.speaker = *speaker;
      utt.text = detail::trim(detail::require_string(u, "text", where));
      if (utt.text.empty()) {
        throw Error(Errc::EmptyText, fmt::format("turn {} has no text", utt.turn_index), where);
      }
      sc.utterances.push_back(std::move(utt));
    }
    std::sort(sc.utterances.begin(), sc.utterances.end(),
              [](const Utterance& a, const Utterance& b) { return a.turn_index < b.turn_index; });
    for (std::size_t i = 0; i < sc.utterances.size(); ++i) {
      if (sc.utterances[i].turn_index != i) {
        throw Error(Errc::MalformedRecord, "turn indices must be unique and contiguous from 0", where);
      }
    }

    std::vector<RawAnnotation> raw;
    if (auto it = rec.find("annotations"); it != rec.end()) {
      if (!it->is_array()) throw Error(Errc::MalformedRecord, "annotations must be an array", where);
      std::set<std::size_t> annotated;
      for (const auto& a : *it) {
        RawAnnotation ra;
        ra.case_id = sc.case_id;
        const auto turn = detail::require_int(a, "turn", where);
        if (turn < 0 || static_cast<std::size_t>(turn) >= sc.utterances.size()) {
          throw Error(Errc::MalformedRecord, fmt::format("annotation turn {} out of range", turn), where);
        }
        ra.turn_index = static_cast<std::size_t>(turn);
        if (!annotated.insert(ra.turn_index).second) {
          throw Error(Errc::MalformedRecord, fmt::format("turn {} annotated twice", turn), where);
        }
        const json& intents = detail::require(a, "intents", where);
        if (!intents.is_array() || intents.empty()) {
          throw Error(Errc::MalformedRecord, "intents must be a non-empty array", where);
        }
        for (const auto& tok : intents) {
          if (!tok.is_string()) throw Error(Errc::MalformedRecord, "intent codes are strings", where);
          try {
            ra.intents.push_back(parse_intent_code(tok.get<std::string>(), taxonomy));
          } catch (const Error& e) {
            throw Error(e.code(), e.detail(), where);
          }
        }
        raw.push_back(std::move(ra));
      }
      std::sort(raw.begin(), raw.end(),
                [](const RawAnnotation& a, const RawAnnotation& b) { return a.turn_index < b.turn_index; });
    }

    std::vector<SbsRecord> records;
    try {
      records = normalize_sbs(raw, std::span<const ScamCase>(&sc, 1));
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), where + " (" + e.where() + ")");
    }
    corpus.sbs.insert(corpus.sbs.end(), records.begin(), records.end());
    corpus.cases.push_back(std::move(sc));
  }
  return corpus;
}

Corpus parse_corpus_file(const std::filesystem::path& path, const Taxonomy& taxonomy) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open corpus", path.string());
  return parse_corpus(in, taxonomy, path.string());
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& sc : corpus.cases) {
    detail::ordered_json rec;
    rec["case_id"] = sc.case_id;
    rec["scenario"] = to_string(sc.scenario);
    rec["label"] = to_string(sc.label);
    auto& utts = rec["utterances"] = detail::ordered_json::array();
    for (const auto& u : sc.utterances) {
      utts.push_back({{"turn", u.turn_index}, {"speaker", to_string(u.speaker)}, {"text", u.text}});
    }
    auto& anns = rec["annotations"] = detail::ordered_json::array();
    for (const auto& r : corpus.sbs_for(sc.case_id)) {
      if (r.primary || anns.empty() || anns.back()["turn"].get<std::size_t>() != r.turn_index) {
        anns.push_back({{"turn", r.turn_index}, {"intents", detail::ordered_json::array()}});
      }
      anns.back()["intents"].push_back(format_code(r.intent));
    }
    out += rec.dump();
    out += '\n';
  }
  return out;
}

ValidationReport validate_corpus(const Corpus& corpus) {
  ValidationReport report;
  auto add = [&](const std::string& case_id, std::optional<std::size_t> turn, std::string msg) {
    report.violations.push_back(Violation{case_id, turn, std::move(msg)});
  };

  std::map<std::string, const ScamCase*> by_id;
  for (const auto& sc : corpus.cases) {
    if (!by_id.emplace(sc.case_id, &sc).second) add(sc.case_id, std::nullopt, "duplicate case_id");
    if (sc.utterances.empty()) add(sc.case_id, std::nullopt, "case has no utterances");
    if (sc.label == Label::non_scam && sc.scenario == Scenario::prosecutor_impersonation) {
      add(sc.case_id, std::nullopt, "non_scam label on a scam scenario");
    }
    for (std::size_t i = 0; i < sc.utterances.size(); ++i) {
      const auto& u = sc.utterances[i];
      if (u.turn_index != i) add(sc.case_id, u.turn_index, "turn index out of sequence");
      if (u.case_id != sc.case_id) add(sc.case_id, u.turn_index, "utterance case_id mismatch");
      if (u.text.empty()) {
        add(sc.case_id, u.turn_index, "empty text");
      } else if (detail::trim(u.text) != u.text) {
        add(sc.case_id, u.turn_index, "untrimmed text");
      }
    }
  }

  std::map<std::pair<std::string, std::size_t>, int> primaries;
  for (const auto& r : corpus.sbs) {
    auto it = by_id.find(r.case_id);
    if (it == by_id.end()) {
      add(r.case_id, r.turn_index, "SBS record references an unknown case");
      continue;
    }
    const auto& utts = it->second->utterances;
    if (r.turn_index >= utts.size()) {
      add(r.case_id, r.turn_index, "SBS record references a missing turn");
      continue;
    }
    if (utts[r.turn_index].speaker != Speaker::scammer) {
      add(r.case_id, r.turn_index, "SBS record references a user turn");
    }
    if (corpus.taxonomy.find(r.intent.stage, r.intent.step) == nullptr) {
      add(r.case_id, r.turn_index, "intent " + format_code(r.intent) + " not in taxonomy");
    }
    int& n = primaries[{r.case_id, r.turn_index}];
    if (r.primary) ++n;
  }
  for (const auto& [key, n] : primaries) {
    if (n != 1) add(key.first, key.second, fmt::format("turn has {} primary intents", n));
  }
  return report;
}

std::pair<std::vector<IntentCode>, std::vector<IntentCode>> align_primary_intents(const Corpus& a,
                                                                                   const Corpus& b) {
  std::map<std::pair<std::string, std::size_t>, IntentCode> rhs;
  for (const auto& r : b.sbs) {
    if (r.primary) rhs.emplace(std::pair{r.case_id, r.turn_index}, r.intent);
  }
  std::pair<std::vector<IntentCode>, std::vector<IntentCode>> out;
  for (const auto& r : a.sbs) {
    if (!r.primary) continue;
    auto it = rhs.find({r.case_id, r.turn_index});
    if (it == rhs.end()) continue;
    out.first.push_back(r.intent);
    out.second.push_back(it->second);
  }
  return out;
}

}  // namespace scriptmind
