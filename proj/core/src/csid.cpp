#include "scriptmind/csid.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

#include "json_util.hpp"
#include "scriptmind/error.hpp"
#include "scriptmind/rng.hpp"

namespace scriptmind {

namespace {

std::string instance_id(std::string_view case_id, std::size_t turn) {
  return fmt::format("{}#t{:03}", case_id, turn);
}

std::vector<std::string> prefix_texts(const ScamCase& sc, std::size_t cut) {
  std::vector<std::string> out;
  out.reserve(cut);
  for (std::size_t i = 0; i < cut; ++i) out.push_back(sc.utterances[i].text);
  return out;
}

bool has_room(std::size_t turn, const SegmentationPolicy& policy) {
  return turn >= std::max<std::size_t>(1, policy.min_context);
}

}  // namespace

std::string render_rationale(const IntentCode& current, const IntentCode& next, const Taxonomy& taxonomy,
                             const PromptTemplates& templates) {
  const IntentCode* cur = taxonomy.find(current.stage, current.step);
  const IntentCode* nxt = taxonomy.find(next.stage, next.step);
  if (cur == nullptr) throw Error(Errc::UnknownCode, format_code(current) + " is not in the taxonomy");
  if (nxt == nullptr) throw Error(Errc::UnknownCode, format_code(next) + " is not in the taxonomy");
  return substitute(templates.rationale, {{"current", cur->description}, {"next", nxt->description}});
}

std::vector<CsidInstance> segment_case(const ScamCase& sc, std::span<const SbsRecord> sbs,
                                       const SegmentationPolicy& policy, const Taxonomy& taxonomy,
                                       const PromptTemplates& templates) {
  if (sc.label != Label::scam) throw Error(Errc::NotScamCase, "segment_case needs a scam case", sc.case_id);
  if (policy.min_predecessors == 0) {
    throw Error(Errc::InvalidArgument, "scam segmentation needs min_predecessors >= 1");
  }

  std::map<std::size_t, IntentCode> labeled;
  for (const auto& r : sbs) {
    if (r.case_id != sc.case_id || !r.primary) continue;
    if (r.turn_index >= sc.utterances.size()) {
      throw Error(Errc::InvalidArgument, "SBS record past the end of the case", sc.case_id);
    }
    labeled.emplace(r.turn_index, r.intent);
  }

  std::vector<CsidInstance> out;
  std::size_t seen = 0;
  const IntentCode* previous = nullptr;
  for (const auto& [turn, intent] : labeled) {
    if (seen >= policy.min_predecessors && has_room(turn, policy)) {
      CsidInstance inst;
      inst.instance_id = instance_id(sc.case_id, turn);
      inst.label = Label::scam;
      inst.context = prefix_texts(sc, turn);
      inst.next_utterance = sc.utterances[turn].text;
      inst.rationale = render_rationale(*previous, intent, taxonomy, templates);
      inst.source_case = sc.case_id;
      inst.cut_index = turn - 1;
      out.push_back(std::move(inst));
    }
    previous = &intent;
    ++seen;
  }
  return out;
}

std::vector<CsidInstance> make_benign_instances(std::span<const ScamCase> benign_cases,
                                                const SegmentationPolicy& policy) {
  std::vector<CsidInstance> out;
  for (const auto& sc : benign_cases) {
    if (sc.label != Label::non_scam) {
      throw Error(Errc::NotBenignCase, "make_benign_instances needs non_scam cases", sc.case_id);
    }
    std::size_t seen = 0;
    for (const auto& u : sc.utterances) {
      if (u.speaker != Speaker::scammer) continue;
      if (seen >= policy.min_predecessors && has_room(u.turn_index, policy)) {
        CsidInstance inst;
        inst.instance_id = instance_id(sc.case_id, u.turn_index);
        inst.label = Label::non_scam;
        inst.context = prefix_texts(sc, u.turn_index);
        inst.source_case = sc.case_id;
        inst.cut_index = u.turn_index - 1;
        out.push_back(std::move(inst));
      }
      ++seen;
    }
  }
  return out;
}

CsidBuild build_csid(const Corpus& corpus, const SegmentationPolicy& policy, const PromptTemplates& templates,
                     unsigned jobs) {
  auto one = [&](const ScamCase& sc) {
    if (sc.label == Label::scam) {
      const auto records = corpus.sbs_for(sc.case_id);
      return segment_case(sc, records, policy, corpus.taxonomy, templates);
    }
    return make_benign_instances(std::span<const ScamCase>(&sc, 1), policy);
  };

  std::vector<std::vector<CsidInstance>> per_case(corpus.cases.size());
  if (jobs <= 1 || corpus.cases.size() < 2) {
    for (std::size_t i = 0; i < corpus.cases.size(); ++i) per_case[i] = one(corpus.cases[i]);
  } else {
    const std::size_t workers = std::min<std::size_t>(jobs, corpus.cases.size());
    std::vector<std::future<void>> tasks;
    for (std::size_t w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < corpus.cases.size(); i += workers) per_case[i] = one(corpus.cases[i]);
      }));
    }
    for (auto& t : tasks) t.get();
  }

  CsidBuild build;
  for (std::size_t i = 0; i < corpus.cases.size(); ++i) {
    auto& dst = corpus.cases[i].label == Label::scam ? build.scam : build.benign;
    std::move(per_case[i].begin(), per_case[i].end(), std::back_inserter(dst));
  }
  return build;
}

namespace {

std::vector<CsidInstance> sample_in_order(std::span<const CsidInstance> items, std::size_t n, SeededRng& rng) {
  std::vector<std::size_t> idx(items.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  // Partial Fisher-Yates: the first n slots become a uniform n-subset.
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<CsidInstance> out;
  out.reserve(n);
  for (auto i : idx) out.push_back(items[i]);
  return out;
}

}  // namespace

std::vector<CsidInstance> balance_dataset(std::span<const CsidInstance> scam, std::span<const CsidInstance> benign,
                                          std::uint64_t seed) {
  if (scam.empty() || benign.empty()) throw Error(Errc::EmptySide, "both classes need instances");
  const std::size_t n = std::min(scam.size(), benign.size());
  SeededRng rng_scam(mix_seed(seed, 1));
  SeededRng rng_benign(mix_seed(seed, 2));
  auto out = sample_in_order(scam, n, rng_scam);
  auto rhs = sample_in_order(benign, n, rng_benign);
  std::move(rhs.begin(), rhs.end(), std::back_inserter(out));
  return out;
}

DatasetSplit split_dataset(std::span<const CsidInstance> instances, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(Errc::InvalidArgument, "test_fraction must lie in (0, 1)");
  }
  // Cases in first-appearance order, bucketed by label.
  std::map<std::string, Label> case_label;
  std::vector<std::string> order[2];
  for (const auto& inst : instances) {
    auto [it, fresh] = case_label.emplace(inst.source_case, inst.label);
    if (fresh) {
      order[inst.label == Label::scam ? 0 : 1].push_back(inst.source_case);
    } else if (it->second != inst.label) {
      throw Error(Errc::InvalidArgument, "case carries both labels", inst.source_case);
    }
  }
  if (case_label.size() < 2) throw Error(Errc::TooFewCases, "need at least two cases to split");

  std::map<std::string, bool> in_test;
  for (int stratum = 0; stratum < 2; ++stratum) {
    auto cases = order[stratum];
    SeededRng rng(mix_seed(seed, static_cast<std::uint64_t>(stratum)));
    rng.shuffle(std::span<std::string>(cases));
    const auto take = static_cast<std::size_t>(std::floor(static_cast<double>(cases.size()) * test_fraction + 0.5));
    for (std::size_t i = 0; i < cases.size(); ++i) in_test[cases[i]] = i < take;
  }

  DatasetSplit split;
  split.seed = seed;
  for (int stratum = 0; stratum < 2; ++stratum) {
    for (const auto& c : order[stratum]) (in_test[c] ? split.test_cases : split.train_cases).push_back(c);
  }
  if (split.test_cases.empty() || split.train_cases.empty()) {
    throw Error(Errc::TooFewCases, "split leaves one side without cases");
  }
  std::sort(split.test_cases.begin(), split.test_cases.end());
  std::sort(split.train_cases.begin(), split.train_cases.end());
  for (const auto& inst : instances) {
    (in_test[inst.source_case] ? split.test : split.train).push_back(inst.instance_id);
  }
  return split;
}

PromptRendering render_prompt(const CsidInstance& inst, const PromptTemplates& templates) {
  std::string conversation;
  for (std::size_t i = 0; i < inst.context.size(); ++i) {
    if (i) conversation += '\n';
    conversation += inst.context[i];
  }
  PromptRendering out;
  out.system = templates.system;
  out.user = substitute(templates.user, {{"conversation", conversation}});
  detail::ordered_json expected;
  expected["label"] = to_string(inst.label);
  if (inst.label == Label::scam) {
    expected["next_utterance"] = inst.next_utterance.value_or("");
    expected["rationale"] = inst.rationale.value_or("");
  }
  out.expected_output = expected.dump();
  return out;
}

std::string serialize_instance(const CsidInstance& inst) {
  detail::ordered_json rec;
  rec["id"] = inst.instance_id;
  rec["label"] = to_string(inst.label);
  rec["context"] = inst.context;
  if (inst.next_utterance) rec["next_utterance"] = *inst.next_utterance;
  if (inst.rationale) rec["rationale"] = *inst.rationale;
  rec["source_case"] = inst.source_case;
  rec["cut_index"] = inst.cut_index;
  return rec.dump();
}

CsidInstance parse_instance(std::string_view line, std::string_view where) {
  const std::string loc(where);
  detail::json rec;
  try {
    rec = detail::json::parse(line);
  } catch (const detail::json::parse_error& e) {
    throw Error(Errc::MalformedLine, e.what(), loc);
  }
  try {
    CsidInstance inst;
    inst.instance_id = detail::require_string(rec, "id", loc);
    const auto label = parse_label(detail::require_string(rec, "label", loc));
    if (!label) throw Error(Errc::MalformedLine, "unknown label", loc);
    inst.label = *label;
    const auto& ctx = detail::require(rec, "context", loc);
    if (!ctx.is_array() || ctx.empty()) throw Error(Errc::MalformedLine, "context must be a non-empty array", loc);
    for (const auto& c : ctx) {
      if (!c.is_string()) throw Error(Errc::MalformedLine, "context entries are strings", loc);
      inst.context.push_back(c.get<std::string>());
    }
    if (rec.contains("next_utterance")) inst.next_utterance = detail::require_string(rec, "next_utterance", loc);
    if (rec.contains("rationale")) inst.rationale = detail::require_string(rec, "rationale", loc);
    inst.source_case = detail::require_string(rec, "source_case", loc);
    const auto cut = detail::require_int(rec, "cut_index", loc);
    if (cut < 0) throw Error(Errc::MalformedLine, "negative cut_index", loc);
    inst.cut_index = static_cast<std::size_t>(cut);
    const bool scam = inst.label == Label::scam;
    const bool complete = inst.next_utterance && !inst.next_utterance->empty() && inst.rationale &&
                          !inst.rationale->empty();
    const bool bare = !inst.next_utterance && !inst.rationale;
    if ((scam && !complete) || (!scam && !bare)) {
      throw Error(Errc::MalformedLine, "label and continuation fields disagree", loc);
    }
    return inst;
  } catch (const Error& e) {
    if (e.code() == Errc::MalformedLine) throw;
    throw Error(Errc::MalformedLine, e.detail(), loc);
  }
}

void write_dataset(std::span<const CsidInstance> instances, const std::filesystem::path& path) {
  std::string out;
  for (const auto& inst : instances) {
    out += serialize_instance(inst);
    out += '\n';
  }
  detail::write_file(path, out);
}

std::vector<CsidInstance> read_dataset(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  std::vector<CsidInstance> out;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    ++lineno;
    std::string_view line(text.data() + pos, nl - pos);
    if (!detail::is_blank(line)) out.push_back(parse_instance(line, detail::location(path.string(), lineno)));
    pos = nl + 1;
  }
  return out;
}

}  // namespace scriptmind
