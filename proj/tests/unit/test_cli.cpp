#include <doctest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "scriptmind/experiment/service.hpp"
#include "scriptmind/prompt.hpp"
#include "test_support.hpp"

using namespace scriptmind;
namespace t = scriptmind::testing;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "scriptmind");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return (t::fixtures_dir() / name).string(); }

std::vector<std::string> eval_args(const std::filesystem::path& out_dir) {
  return {"eval",
          "--dataset",
          (t::data_dir() / "mock_eval" / "dataset.jsonl").string(),
          "--model-url",
          "mock://keyword",
          "--judge-url",
          "mock://overlap-judge",
          "--seed",
          "1",
          "--jobs",
          "4",
          "--out-dir",
          out_dir.string()};
}

}  // namespace

TEST_CASE("help and argument errors") {
  CHECK(run({"--help"}).code == 0);
  for (const char* sub : {"ingest", "sequences", "csid", "eval", "judge-corr"}) {
    const auto r = run({sub, "--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("--") != std::string::npos);
  }
  CHECK(run({"experiment", "serve", "--help"}).code == 0);
  CHECK(run({"experiment", "analyze", "--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);

  CHECK(run({"sequences", "--corpus", fixture("sequences2.jsonl")}).code == 1);  // missing --out-dir
  CHECK(run({"sequences", "--bogus"}).code == 1);
  CHECK(run({"ingest", "--corpus", "/does/not/exist.jsonl"}).code == 1);
  CHECK(run({"csid", "--corpus", fixture("corpus10.jsonl"), "--out-dir", "x"}).code == 1);  // missing --seed
}

TEST_CASE("ingest") {
  t::TempDir dir;
  const auto r = run({"ingest", "--corpus", fixture("corpus10.jsonl"), "--out", (dir / "v.json").string()});
  CHECK(r.code == 0);
  CHECK(t::read_json(dir / "v.json").is_object());

  std::ofstream(dir / "bad.jsonl") << "{\"case_id\": 1}\n";
  CHECK(run({"ingest", "--corpus", (dir / "bad.jsonl").string()}).code == 1);
}

TEST_CASE("sequences") {
  t::TempDir dir;
  const auto r = run({"sequences", "--corpus", fixture("sequences2.jsonl"), "--out-dir", dir.path().string()});
  REQUIRE(r.code == 0);
  CHECK(t::lines_of(t::slurp(dir / "transitions.csv")).size() == 2);
  for (const char* f : {"network.dot", "network.json", "sequences.json"}) CHECK(std::filesystem::exists(dir / f));

  const auto again = run({"sequences", "--corpus", fixture("sequences2.jsonl"), "--out-dir", dir.path().string()});
  CHECK(again.code == 1);
  CHECK(again.err.find("OutputExists") != std::string::npos);
  CHECK(run({"sequences", "--corpus", fixture("sequences2.jsonl"), "--out-dir", dir.path().string(), "--force"})
            .code == 0);
}

TEST_CASE("config file with flag override") {
  t::TempDir dir;
  std::ofstream(dir / "c.toml") << "[sequences]\ncorpus = \"" << fixture("sequences2.jsonl") << "\"\nmode = \"adjusted\"\n"
                                << "out-dir = \"" << (dir / "a").string() << "\"\n";
  CHECK(run({"sequences", "--config", (dir / "c.toml").string()}).code == 0);
  CHECK(std::filesystem::exists(dir / "a" / "transitions.csv"));
  CHECK(run({"sequences", "--config", (dir / "c.toml").string(), "--out-dir", (dir / "b").string()}).code == 0);
  CHECK(std::filesystem::exists(dir / "b" / "transitions.csv"));
}

TEST_CASE("csid is reproducible") {
  t::TempDir dir;
  for (const char* sub : {"one", "two"}) {
    const auto r = run({"csid", "--corpus", fixture("corpus10.jsonl"), "--seed", "7", "--out-dir", (dir / sub).string()});
    REQUIRE(r.code == 0);
  }
  for (const char* f : {"dataset.jsonl", "train.jsonl", "test.jsonl", "split.json", "summary.json"}) {
    CHECK(t::slurp(dir / "one" / f) == t::slurp(dir / "two" / f));
  }
  CHECK(t::slurp(dir / "one" / "dataset.jsonl") == t::slurp(t::data_dir() / "mock_eval" / "dataset.jsonl"));
}

TEST_CASE("eval against packaged mocks") {
  t::TempDir dir;
  REQUIRE(run(eval_args(dir / "a")).code == 0);
  REQUIRE(run(eval_args(dir / "b")).code == 0);
  CHECK(t::slurp(dir / "a" / "report.jsonl") == t::slurp(dir / "b" / "report.jsonl"));

  const auto got = t::read_json(dir / "a" / "aggregate.json");
  const auto golden = t::read_json(t::data_dir() / "mock_eval" / "golden_aggregate.json");
  for (const char* k : {"tp", "tn", "fp", "fn", "n"}) CHECK(got["detection"][k] == golden["detection"][k]);
  for (const char* target : {"next_utterance", "rationale"}) {
    for (const char* k : {"scam_mean", "all_mean"}) {
      CHECK(std::abs(got["judge"][target][k].get<double>() - golden["judge"][target][k].get<double>()) < 1e-12);
    }
  }

  SUBCASE("judge-corr") {
    std::ofstream ratings(dir / "ratings.csv");
    ratings << "instance_id,rater_id,score_1_to_7,target\n";
    int i = 0;
    for (const auto& line : t::lines_of(t::slurp(dir / "a" / "report.jsonl"))) {
      const auto rec = t::json::parse(line);
      if (rec["type"] != "instance") continue;
      ratings << rec["id"].get<std::string>() << ",r1," << 1 + (i++ % 7) << ",\n";
    }
    ratings.close();
    const auto out = dir / "corr.csv";
    const auto r = run({"judge-corr", "--report", (dir / "a" / "report.jsonl").string(), "--ratings",
                        (dir / "ratings.csv").string(), "--out", out.string()});
    CHECK(r.code == 0);
    const auto lines = t::lines_of(t::slurp(out));
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == "pair,r,p_value,n");
    CHECK(lines[1].starts_with("judge_"));
  }
}

TEST_CASE("eval against an unreachable endpoint fails at runtime") {
  t::TempDir dir;
  auto args = eval_args(dir / "x");
  args[4] = "http://127.0.0.1:1/v1";
  args.insert(args.end(), {"--model-attempts", "1", "--model-timeout", "1"});
  CHECK(run(args).code == 2);
}

TEST_CASE("experiment analyze") {
  t::TempDir dir;
  const auto log_path = dir / "events.jsonl";
  {
    experiment::EventLog log(log_path);
    experiment::ServiceConfig cfg;
    cfg.script = experiment::StimulusScript::load(resource_dir() / "experiment" / "script.json");
    cfg.warnings = experiment::WarningContent::load(resource_dir() / "experiment" / "warnings.json");
    cfg.seed = 5;
    experiment::ExperimentService svc(cfg, log);
    for (int i = 0; i < 9; ++i) {
      const auto s = svc.create_session(experiment::kAgeBands[static_cast<std::size_t>(i % 4)]);
      for (int st = 1; st <= experiment::kStageCount; ++st) {
        const int v = 1 + (i + st) % 7;
        svc.submit_response(s.session_id, {st, v, 8 - v, 4, 1 + i % 7, 10});
      }
    }
  }
  const auto r = run({"experiment", "analyze", "--log", log_path.string(), "--seed", "1", "--bootstrap", "100",
                      "--out-dir", (dir / "out").string()});
  REQUIRE(r.code == 0);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "out")) ++files;
  CHECK(files == 12);
  CHECK(t::read_json(dir / "out" / "anxiety_analysis.json")["n_completed"] == 9);

  CHECK(run({"experiment", "analyze", "--log", log_path.string(), "--seed", "1", "--variable", "mood", "--out-dir",
             (dir / "bad").string()})
            .code == 1);
}
