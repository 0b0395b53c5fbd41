#include <doctest.h>

#include <set>
#include <sstream>

#include "scriptmind/csid.hpp"
#include "scriptmind/error.hpp"
#include "test_support.hpp"

using namespace scriptmind;
namespace t = scriptmind::testing;

namespace {

const Taxonomy& taxonomy() {
  static const Taxonomy tax = Taxonomy::load(resource_dir() / "taxonomy.jsonl");
  return tax;
}

IntentCode code(int stage, int step) { return *taxonomy().find(stage, step); }

// Scammer turns carry `intents` (empty string = unlabeled); each is followed by a user turn.
ScamCase make_case(const std::string& id, Label label, std::size_t scammer_turns) {
  ScamCase sc;
  sc.case_id = id;
  sc.label = label;
  sc.scenario = label == Label::scam ? Scenario::prosecutor_impersonation : Scenario::benign_police_summons;
  std::size_t turn = 0;
  for (std::size_t i = 0; i < scammer_turns; ++i) {
    sc.utterances.push_back({id, turn, Speaker::scammer, id + " caller " + std::to_string(turn)});
    ++turn;
    sc.utterances.push_back({id, turn, Speaker::user, id + " user " + std::to_string(turn)});
    ++turn;
  }
  return sc;
}

std::vector<SbsRecord> label_all(const ScamCase& sc, std::vector<IntentCode> intents) {
  std::vector<SbsRecord> out;
  std::size_t k = 0;
  for (const auto& u : sc.utterances) {
    if (u.speaker == Speaker::scammer && k < intents.size()) out.push_back({sc.case_id, u.turn_index, intents[k++], true});
  }
  return out;
}

std::vector<CsidInstance> dummy(Label label, std::size_t n, const std::string& prefix) {
  std::vector<CsidInstance> out;
  for (std::size_t i = 0; i < n; ++i) {
    CsidInstance c;
    c.instance_id = prefix + std::to_string(i);
    c.label = label;
    c.context = {"hello"};
    c.source_case = prefix + std::to_string(i / 2);
    if (label == Label::scam) {
      c.next_utterance = "next";
      c.rationale = "why";
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("segment_case") {
  const SegmentationPolicy policy{1, 1};
  SUBCASE("five labeled turns give four instances") {
    const auto sc = make_case("c", Label::scam, 5);
    const auto sbs = label_all(sc, {code(1, 1), code(1, 2), code(1, 3), code(2, 1), code(2, 2)});
    const auto xs = segment_case(sc, sbs, policy, taxonomy());
    REQUIRE(xs.size() == 4);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      // prefix enumeration: cut before the (i+2)-th scammer turn, i+1 labeled predecessors
      const std::size_t turn = 2 * (i + 1);
      CHECK(xs[i].context.size() == turn);
      CHECK(xs[i].next_utterance == sc.utterances[turn].text);
      CHECK(xs[i].cut_index == turn - 1);
      for (const auto& line : xs[i].context) CHECK(line != *xs[i].next_utterance);
    }
    CHECK(xs[0].rationale == render_rationale(code(1, 1), code(1, 2), taxonomy()));
  }
  SUBCASE("one labeled turn gives none") {
    const auto sc = make_case("c", Label::scam, 3);
    CHECK(segment_case(sc, label_all(sc, {code(1, 1)}), policy, taxonomy()).empty());
  }
  SUBCASE("min_context raises the first cut") {
    const auto sc = make_case("c", Label::scam, 5);
    const auto sbs = label_all(sc, {code(1, 1), code(1, 2), code(1, 3), code(2, 1), code(2, 2)});
    CHECK(segment_case(sc, sbs, {5, 1}, taxonomy()).size() == 2);
    CHECK(segment_case(sc, sbs, {1, 3}, taxonomy()).size() == 2);
  }
  SUBCASE("benign case rejected") {
    const auto sc = make_case("c", Label::non_scam, 2);
    CHECK_THROWS_AS(segment_case(sc, {}, policy, taxonomy()), Error);
  }
}

TEST_CASE("render_rationale") {
  const auto s = render_rationale(code(3, 3), code(3, 4), taxonomy());
  const auto a = s.find(code(3, 3).description);
  const auto b = s.find(code(3, 4).description);
  REQUIRE(a != std::string::npos);
  REQUIRE(b != std::string::npos);
  CHECK(a < b);

  const auto same = render_rationale(code(2, 2), code(2, 2), taxonomy());
  const auto first = same.find(code(2, 2).description);
  CHECK(same.find(code(2, 2).description, first + 1) != std::string::npos);

  CHECK(render_rationale(code(2, 1), code(2, 3), taxonomy()) ==
        t::slurp(t::data_dir() / "rationale_2-1_to_2-3.txt"));

  CHECK_THROWS_AS(render_rationale(IntentCode{9, 9, {}}, code(1, 1), taxonomy()), Error);
}

TEST_CASE("benign instances") {
  const SegmentationPolicy policy{1, 1};
  const auto sc = make_case("b", Label::non_scam, 4);  // caller turns 0, 2, 4, 6 -> cuts at 2, 4, 6
  const auto xs = make_benign_instances(std::span(&sc, 1), policy);
  REQUIRE(xs.size() == 3);
  for (const auto& x : xs) {
    CHECK(x.label == Label::non_scam);
    CHECK_FALSE(x.next_utterance.has_value());
    CHECK_FALSE(x.rationale.has_value());
  }
  CHECK(make_benign_instances({}, policy).empty());

  const auto corpus = parse_corpus_file(t::fixtures_dir() / "corpus10.jsonl", taxonomy());
  std::vector<ScamCase> benign;
  for (const auto& c : corpus.cases) {
    if (c.label == Label::non_scam && benign.size() < 4) benign.push_back(c);
  }
  REQUIRE(benign.size() == 4);
  std::size_t expected = 0;
  for (const auto& c : benign) {
    std::size_t callers_before = 0;
    for (const auto& u : c.utterances) {
      if (u.speaker != Speaker::scammer) continue;
      if (callers_before >= 1 && u.turn_index >= 1) ++expected;
      ++callers_before;
    }
  }
  CHECK(make_benign_instances(benign, policy).size() == expected);
  CHECK_THROWS_AS(make_benign_instances(std::span(&corpus.cases[0], 1), policy), Error);
}

TEST_CASE("balance_dataset") {
  CHECK(balance_dataset(dummy(Label::scam, 10, "s"), dummy(Label::non_scam, 10, "b"), 1).size() == 20);
  const auto out = balance_dataset(dummy(Label::scam, 10, "s"), dummy(Label::non_scam, 4, "b"), 1);
  REQUIRE(out.size() == 8);
  std::size_t scam = 0;
  for (const auto& x : out) scam += x.label == Label::scam;
  CHECK(scam == 4);
  CHECK(out == balance_dataset(dummy(Label::scam, 10, "s"), dummy(Label::non_scam, 4, "b"), 1));
  CHECK_THROWS_AS(balance_dataset(dummy(Label::scam, 3, "s"), {}, 1), Error);
}

TEST_CASE("render_prompt") {
  auto benign = dummy(Label::non_scam, 1, "b")[0];
  CHECK(render_prompt(benign).expected_output == R"({"label":"non_scam"})");

  const auto scam = dummy(Label::scam, 1, "s")[0];
  const auto r = render_prompt(scam);
  const auto j = t::json::parse(r.expected_output);  // throws on trailing text
  CHECK(j.is_object());
  std::set<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.insert(k);
  CHECK(keys == std::set<std::string>{"label", "next_utterance", "rationale"});
  CHECK(r.user.find("hello") != std::string::npos);
  CHECK(r.system == PromptTemplates::defaults().system);
}

TEST_CASE("split_dataset") {
  std::vector<CsidInstance> xs;
  for (int c = 0; c < 10; ++c) {
    auto inst = dummy(c < 5 ? Label::scam : Label::non_scam, 1, "x")[0];
    inst.instance_id = "i" + std::to_string(c);
    inst.source_case = "case" + std::to_string(c);
    xs.push_back(inst);
  }
  const auto s = split_dataset(xs, 0.2, 3);
  CHECK(s.test_cases.size() == 2);
  CHECK(s.train_cases.size() == 8);
  const auto again = split_dataset(xs, 0.2, 3);
  CHECK(again.test == s.test);
  CHECK(again.train == s.train);

  std::vector<CsidInstance> strat;
  for (int c = 0; c < 10; ++c) {
    auto inst = dummy(c < 6 ? Label::scam : Label::non_scam, 1, "x")[0];
    inst.instance_id = "i" + std::to_string(c);
    inst.source_case = "case" + std::to_string(c);
    strat.push_back(inst);
  }
  const auto half = split_dataset(strat, 0.5, 11);
  std::size_t scam_test = 0;
  for (const auto& id : half.test) scam_test += std::stoi(id.substr(1)) < 6;
  CHECK(scam_test == 3);
  CHECK(half.test.size() == 5);

  CHECK_THROWS_AS(split_dataset(xs, 0.0, 1), Error);
  CHECK_THROWS_AS(split_dataset(xs, 1.0, 1), Error);
}

TEST_CASE("dataset io") {
  t::TempDir dir;
  const auto corpus = parse_corpus_file(t::fixtures_dir() / "corpus10.jsonl", taxonomy());
  const auto build = build_csid(corpus, {});
  auto all = build.scam;
  all.insert(all.end(), build.benign.begin(), build.benign.end());
  write_dataset(all, dir / "d.jsonl");
  CHECK(read_dataset(dir / "d.jsonl") == all);

  std::string text = t::slurp(dir / "d.jsonl");
  const auto second_nl = text.find('\n', text.find('\n') + 1);
  text.resize(second_nl + 20);  // line 3 is cut short
  {
    std::ofstream(dir / "bad.jsonl") << text;
  }
  try {
    read_dataset(dir / "bad.jsonl");
    FAIL("expected MalformedLine");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedLine);
    CHECK(e.where().ends_with(":3"));
  }

  std::vector<CsidInstance> many;
  for (int i = 0; i < 1000; ++i) {
    auto x = all[static_cast<std::size_t>(i) % all.size()];
    x.instance_id = "n" + std::to_string(i);
    many.push_back(std::move(x));
  }
  write_dataset(many, dir / "many.jsonl");
  const auto body = t::slurp(dir / "many.jsonl");
  CHECK(std::count(body.begin(), body.end(), '\n') == 1000);
}

TEST_CASE("build_csid is order preserving under jobs") {
  const auto corpus = parse_corpus_file(t::fixtures_dir() / "corpus10.jsonl", taxonomy());
  const auto one = build_csid(corpus, {}, PromptTemplates::defaults(), 1);
  const auto four = build_csid(corpus, {}, PromptTemplates::defaults(), 4);
  CHECK(one.scam == four.scam);
  CHECK(one.benign == four.benign);
}
