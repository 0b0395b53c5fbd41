#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include "scriptmind/client.hpp"
#include "scriptmind/corpus.hpp"
#include "scriptmind/csid.hpp"
#include "scriptmind/error.hpp"
#include "scriptmind/eval.hpp"
#include "scriptmind/experiment/analysis.hpp"
#include "scriptmind/experiment/http_api.hpp"
#include "scriptmind/experiment/service.hpp"
#include "scriptmind/prompt.hpp"
#include "scriptmind/sequence.hpp"

namespace scriptmind::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

bool is_validation(Errc code) {
  switch (code) {
    case Errc::MalformedRecord:
    case Errc::DuplicateCaseId:
    case Errc::UnknownSpeaker:
    case Errc::EmptyText:
    case Errc::BadFormat:
    case Errc::UnknownCode:
    case Errc::NonScammerUtterance:
    case Errc::LengthMismatch:
    case Errc::DegenerateMarginals:
    case Errc::EmptySbs:
    case Errc::NotScamCase:
    case Errc::NotBenignCase:
    case Errc::EmptySide:
    case Errc::TooFewCases:
    case Errc::MalformedLine:
    case Errc::EmptyInput:
    case Errc::OutOfRange:
    case Errc::ConstantVector:
    case Errc::NoCompletedSessions:
    case Errc::InvalidArgument:
    case Errc::ConfigError:
    case Errc::OutputExists:
      return true;
    default:
      return false;
  }
}

// Output files of one subcommand: all targets are checked before anything is
// written.
class Outputs {
 public:
  Outputs(fs::path dir, bool force) : dir_(std::move(dir)), force_(force) {}

  void expect(std::initializer_list<std::string> names) {
    for (const auto& n : names) expect(n);
  }
  void expect(const std::string& name) {
    const auto path = dir_ / name;
    if (!force_ && fs::exists(path)) {
      throw Error(Errc::OutputExists, "output exists; pass --force to overwrite", path.string());
    }
  }
  void write(const std::string& name, std::string_view content) const {
    fs::create_directories(dir_);
    const auto path = dir_ / name;
    const auto tmp = fs::path(path.string() + ".tmp");
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      if (!f) throw Error(Errc::IoError, "cannot write", tmp.string());
      f.write(content.data(), static_cast<std::streamsize>(content.size()));
      if (!f) throw Error(Errc::IoError, "write failed", tmp.string());
    }
    fs::rename(tmp, path);
  }

 private:
  fs::path dir_;
  bool force_;
};

fs::path default_taxonomy() { return resource_dir() / "taxonomy.jsonl"; }

PromptTemplates load_templates(const std::string& dir) {
  return dir.empty() ? PromptTemplates::defaults() : PromptTemplates::load(dir);
}

struct IngestArgs {
  std::string corpus, taxonomy, compare, out;
  bool force = false;
};

int do_ingest(const IngestArgs& a, std::ostream& out) {
  const auto taxonomy = Taxonomy::load(a.taxonomy.empty() ? default_taxonomy() : fs::path(a.taxonomy));
  const auto corpus = parse_corpus_file(a.corpus, taxonomy);
  const auto report = validate_corpus(corpus);

  std::size_t scam = 0, utterances = 0, primaries = 0;
  for (const auto& c : corpus.cases) {
    scam += c.label == Label::scam;
    utterances += c.utterances.size();
  }
  for (const auto& r : corpus.sbs) primaries += r.primary;

  ojson j;
  j["corpus"] = a.corpus;
  j["cases"] = corpus.cases.size();
  j["scam"] = scam;
  j["non_scam"] = corpus.cases.size() - scam;
  j["utterances"] = utterances;
  j["sbs_records"] = corpus.sbs.size();
  j["primary_intents"] = primaries;
  j["taxonomy_nodes"] = taxonomy.codes().size();
  j["violations"] = ojson::array();
  for (const auto& v : report.violations) {
    ojson e;
    e["case_id"] = v.case_id;
    e["turn"] = v.turn_index ? ojson(*v.turn_index) : ojson(nullptr);
    e["message"] = v.message;
    j["violations"].push_back(e);
  }
  if (!a.compare.empty()) {
    const auto other = parse_corpus_file(a.compare, taxonomy);
    const auto [la, lb] = align_primary_intents(corpus, other);
    ojson k;
    k["compare"] = a.compare;
    k["aligned_turns"] = la.size();
    k["kappa"] = cohen_kappa(la, lb);
    j["agreement"] = k;
  }

  if (!a.out.empty()) {
    const fs::path p(a.out);
    Outputs o(p.parent_path().empty() ? fs::path(".") : p.parent_path(), a.force);
    o.expect(p.filename().string());
    o.write(p.filename().string(), j.dump(2) + "\n");
  }
  fmt::print(out, "{} cases ({} scam, {} non_scam), {} utterances, {} SBS records, {} violation(s)\n",
             corpus.cases.size(), scam, corpus.cases.size() - scam, utterances, corpus.sbs.size(),
             report.violations.size());
  for (const auto& v : report.violations) {
    fmt::print(out, "  {}{}: {}\n", v.case_id, v.turn_index ? fmt::format("#{}", *v.turn_index) : "", v.message);
  }
  if (j.contains("agreement")) {
    fmt::print(out, "kappa = {:.4f} over {} aligned turns\n", j["agreement"]["kappa"].get<double>(),
               j["agreement"]["aligned_turns"].get<std::size_t>());
  }
  return report.empty() ? 0 : 1;
}

struct SequencesArgs {
  std::string corpus, taxonomy, mode = "basic", out_dir;
  double threshold = 2.0;
  std::size_t top = 28;
  bool force = false;
};

int do_sequences(const SequencesArgs& a, std::ostream& out) {
  const auto taxonomy = Taxonomy::load(a.taxonomy.empty() ? default_taxonomy() : fs::path(a.taxonomy));
  const auto corpus = parse_corpus_file(a.corpus, taxonomy);
  const auto mode = a.mode == "adjusted" ? ResidualMode::adjusted : ResidualMode::basic;
  Outputs o(a.out_dir, a.force);
  o.expect({"transitions.csv", "network.dot", "network.json", "sequences.json"});

  const auto m = build_transition_matrix(corpus);
  const auto report = make_sequence_report(m, mode, a.threshold);
  const auto top = top_k_transitions(report, a.top);

  ojson j;
  j["corpus"] = a.corpus;
  j["mode"] = to_string(mode);
  j["threshold"] = a.threshold;
  j["states"] = m.size();
  j["transitions"] = m.grand_total();
  j["cells"] = report.cells.size();
  j["omitted_cells"] = report.omitted_cells;
  j["significant"] = report.significant_count;
  j["top"] = ojson::array();
  for (const auto& c : top) {
    j["top"].push_back({{"from", format_code(c.from)},
                        {"to", format_code(c.to)},
                        {"count", c.observed},
                        {"expected", c.expected},
                        {"sr", c.sr}});
  }
  o.write("transitions.csv", export_sr_csv(report.cells));
  o.write("network.dot", export_network(top, NetworkFormat::dot));
  o.write("network.json", export_network(top, NetworkFormat::json));
  o.write("sequences.json", j.dump(2) + "\n");
  fmt::print(out, "{} states, {} transitions, {} cells ({} omitted), {} with sr >= {} [{}]\n", m.size(),
             m.grand_total(), report.cells.size(), report.omitted_cells, report.significant_count, a.threshold,
             to_string(mode));
  return 0;
}

struct CsidArgs {
  std::string corpus, taxonomy, prompts, out_dir;
  std::uint64_t seed = 0;
  double test_fraction = 0.2;
  std::size_t min_context = 1;
  std::size_t min_predecessors = 1;
  unsigned jobs = 1;
  bool force = false;
};

std::string jsonl(std::span<const CsidInstance> xs) {
  std::string s;
  for (const auto& x : xs) {
    s += serialize_instance(x);
    s += '\n';
  }
  return s;
}

int do_csid(const CsidArgs& a, std::ostream& out) {
  const auto taxonomy = Taxonomy::load(a.taxonomy.empty() ? default_taxonomy() : fs::path(a.taxonomy));
  const auto corpus = parse_corpus_file(a.corpus, taxonomy);
  const auto templates = load_templates(a.prompts);
  Outputs o(a.out_dir, a.force);
  o.expect({"dataset.jsonl", "train.jsonl", "test.jsonl", "split.json", "summary.json"});

  const SegmentationPolicy policy{a.min_context, a.min_predecessors};
  const auto build = build_csid(corpus, policy, templates, a.jobs);
  const auto balanced = balance_dataset(build.scam, build.benign, a.seed);
  const auto split = split_dataset(balanced, a.test_fraction, a.seed);

  const std::set<std::string> test_ids(split.test.begin(), split.test.end());
  std::vector<CsidInstance> train, test;
  for (const auto& x : balanced) (test_ids.count(x.instance_id) ? test : train).push_back(x);

  ojson sj;
  sj["seed"] = split.seed;
  sj["test_fraction"] = a.test_fraction;
  sj["train_cases"] = split.train_cases;
  sj["test_cases"] = split.test_cases;
  sj["train"] = split.train;
  sj["test"] = split.test;

  std::size_t scam_kept = 0;
  for (const auto& x : balanced) scam_kept += x.label == Label::scam;
  ojson summary;
  summary["seed"] = a.seed;
  summary["scam_instances"] = build.scam.size();
  summary["benign_instances"] = build.benign.size();
  summary["balanced"] = balanced.size();
  summary["balanced_scam"] = scam_kept;
  summary["balanced_non_scam"] = balanced.size() - scam_kept;
  summary["train"] = train.size();
  summary["test"] = test.size();

  o.write("dataset.jsonl", jsonl(balanced));
  o.write("train.jsonl", jsonl(train));
  o.write("test.jsonl", jsonl(test));
  o.write("split.json", sj.dump(2) + "\n");
  o.write("summary.json", summary.dump(2) + "\n");
  fmt::print(out, "{} scam + {} benign instances; balanced {} ({} train / {} test)\n", build.scam.size(),
             build.benign.size(), balanced.size(), train.size(), test.size());
  return 0;
}

struct EndpointArgs {
  std::string url, model, token_env;
  double timeout = 60.0;
  std::size_t max_in_flight = 4;
  int attempts = 3;
  double backoff = 0.5;
};

ModelEndpoint to_endpoint(const EndpointArgs& e) {
  ModelEndpoint ep;
  ep.base_url = e.url;
  ep.model_name = e.model;
  ep.token_env = e.token_env;
  ep.timeout_s = e.timeout;
  ep.max_in_flight = e.max_in_flight;
  ep.retry = {e.attempts, e.backoff};
  return ep;
}

struct EvalArgs {
  std::string dataset, prompts, mode = "strict", out_dir;
  EndpointArgs model;
  EndpointArgs judge;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool force = false;
};

int do_eval(const EvalArgs& a, std::ostream& out) {
  const auto dataset = read_dataset(a.dataset);
  const auto templates = load_templates(a.prompts);
  Outputs o(a.out_dir, a.force);
  o.expect({"report.jsonl", "aggregate.json"});

  const auto mep = to_endpoint(a.model);
  ModelClient model(mep, make_transport(mep, dataset, templates));
  std::optional<ModelClient> judge;
  if (!a.judge.url.empty()) {
    const auto jep = to_endpoint(a.judge);
    judge.emplace(jep, make_transport(jep, dataset, templates));
  }
  EvalOptions opts;
  opts.seed = a.seed;
  opts.mode = a.mode == "recover" ? ParseMode::recover : ParseMode::strict;
  opts.jobs = a.jobs;
  opts.templates = templates;
  const auto report = evaluate_run(dataset, model, judge ? &*judge : nullptr, opts);

  o.write("report.jsonl", report_jsonl(report));
  o.write("aggregate.json", aggregate_json(report));
  const auto& m = report.metrics;
  fmt::print(out, "n={} acc={:.4f} f1={:.4f} fp={:.4f} fn={:.4f} failed_parses={} query_errors={}\n", m.n,
             m.accuracy, m.f1, m.fp_rate, m.fn_rate, report.failed_parses, report.query_errors);
  if (report.judge_next_utterance && report.judge_rationale) {
    fmt::print(out, "judge next_utterance: scam-only {:.4f}, all {:.4f}; rationale: scam-only {:.4f}, all {:.4f}\n",
               report.judge_next_utterance->scam_mean, report.judge_next_utterance->all_mean,
               report.judge_rationale->scam_mean, report.judge_rationale->all_mean);
  }
  // nothing reached the model: report written, but the run itself failed
  if (report.query_errors == report.records.size()) return 2;
  return 0;
}

struct JudgeCorrArgs {
  std::string report, ratings, out;
  bool force = false;
};

int do_judge_corr(const JudgeCorrArgs& a, std::ostream& out) {
  std::ifstream in(a.report, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open report", a.report);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto report = parse_report_jsonl(buf.str());
  const auto ratings = read_human_ratings(a.ratings);

  std::string csv = "pair,r,p_value,n\n";
  for (auto target : {JudgeTarget::next_utterance, JudgeTarget::rationale}) {
    const auto human = human_scores(ratings, target);
    std::vector<double> x, y;
    for (const auto& r : report.records) {
      const auto& score = target == JudgeTarget::next_utterance ? r.judge_next_utterance : r.judge_rationale;
      const auto h = human.find(r.instance_id);
      if (!score || h == human.end()) continue;
      x.push_back(*score);
      y.push_back(h->second);
    }
    const auto c = pearson(x, y, fmt::format("judge_{}~human", to_string(target)));
    csv += fmt::format("{},{:.6f},{:.6g},{}\n", c.pair_name, c.r, c.p_value, c.n);
  }
  if (!a.out.empty()) {
    const fs::path p(a.out);
    Outputs o(p.parent_path().empty() ? fs::path(".") : p.parent_path(), a.force);
    o.expect(p.filename().string());
    o.write(p.filename().string(), csv);
  }
  out << csv;
  return 0;
}

struct ExperimentArgs {
  std::string script, warnings, log, host = "127.0.0.1", out_dir, variable;
  int port = 8080;
  std::uint64_t seed = 0;
  std::size_t bootstrap = 5000;
  bool force = false;
};

experiment::ServiceConfig service_config(const ExperimentArgs& a, std::uint64_t seed) {
  experiment::ServiceConfig c;
  c.script = experiment::StimulusScript::load(a.script.empty() ? resource_dir() / "experiment" / "script.json"
                                                               : fs::path(a.script));
  c.warnings = experiment::WarningContent::load(
      a.warnings.empty() ? resource_dir() / "experiment" / "warnings.json" : fs::path(a.warnings));
  c.seed = seed;
  return c;
}

int do_serve(const ExperimentArgs& a, std::ostream& out) {
  experiment::EventLog log(a.log);
  experiment::ExperimentService service(service_config(a, a.seed), log);
  experiment::HttpApi api(service, {a.bootstrap, a.seed});
  fmt::print(out, "serving on http://{}:{} (log {})\n", a.host, a.port, a.log);
  out.flush();
  api.listen(a.host, a.port);
  return 0;
}

int do_analyze(const ExperimentArgs& a, std::ostream& out) {
  if (!fs::exists(a.log)) throw Error(Errc::IoError, "event log not found", a.log);
  experiment::EventLog log(a.log);
  const auto seed = experiment::logged_seed(log);
  if (!seed) throw Error(Errc::MalformedLine, "log has no experiment_started event", a.log);
  experiment::ExperimentService service(service_config(a, *seed), log);
  const auto sessions = service.snapshot();

  std::vector<experiment::Variable> vars;
  if (a.variable.empty()) {
    vars = {experiment::Variable::suspicion, experiment::Variable::importance, experiment::Variable::relevance,
            experiment::Variable::anxiety};
  } else {
    const auto v = experiment::parse_variable(a.variable);
    if (!v) throw Error(Errc::InvalidArgument, "unknown variable", a.variable);
    vars = {*v};
  }
  Outputs o(a.out_dir, a.force);
  for (auto v : vars) {
    const std::string n(experiment::to_string(v));
    o.expect({n + "_grid.csv", n + "_trend.csv", n + "_analysis.json"});
  }
  for (auto v : vars) {
    const std::string n(experiment::to_string(v));
    const auto res = experiment::export_analysis(sessions, v, {a.bootstrap, a.seed});
    o.write(n + "_grid.csv", experiment::grid_csv(res));
    o.write(n + "_trend.csv", experiment::trend_csv(res));
    o.write(n + "_analysis.json", experiment::analysis_json(res));
    fmt::print(out, "{}: {} completed, {} incomplete excluded, {} test(s)\n", n, res.completed,
               res.excluded_incomplete, res.tests.size());
  }
  return 0;
}

void add_endpoint(CLI::App* app, EndpointArgs& e, const std::string& prefix, bool required) {
  auto* url = app->add_option("--" + prefix + "-url", e.url,
                              "Endpoint base URL (http(s)://... or mock://keyword, mock://oracle, "
                              "mock://overlap-judge)");
  if (required) url->required();
  app->add_option("--" + prefix + "-name", e.model, "Model name sent with each request");
  app->add_option("--" + prefix + "-token-env", e.token_env, "Environment variable holding the bearer token");
  app->add_option("--" + prefix + "-timeout", e.timeout, "Request timeout in seconds")->capture_default_str();
  app->add_option("--" + prefix + "-max-in-flight", e.max_in_flight, "Concurrent request bound")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--" + prefix + "-attempts", e.attempts, "Attempts per request")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app->add_option("--" + prefix + "-backoff", e.backoff, "Backoff base in seconds (doubles per retry)")
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scam-script analysis, dataset building, evaluation and experiment tooling"};
  app.name("scriptmind");
  app.set_config("--config", "", "Config file of key = value lines (dotted keys per subcommand); flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", "scriptmind 0.1.0");

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse and validate a corpus; optional agreement check");
  c_ingest->add_option("--corpus", ingest.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--taxonomy", ingest.taxonomy, "Taxonomy JSONL (default: packaged)")->check(CLI::ExistingFile);
  c_ingest->add_option("--compare", ingest.compare, "Second annotation of the same corpus for Cohen's kappa")
      ->check(CLI::ExistingFile);
  c_ingest->add_option("--out", ingest.out, "Write the validation report JSON here");
  c_ingest->add_flag("--force", ingest.force, "Overwrite existing outputs");

  SequencesArgs seq;
  auto* c_seq = app.add_subcommand("sequences", "Transition matrix, standardized residuals and network export");
  c_seq->add_option("--corpus", seq.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  c_seq->add_option("--taxonomy", seq.taxonomy, "Taxonomy JSONL (default: packaged)")->check(CLI::ExistingFile);
  c_seq->add_option("--mode", seq.mode, "Residual mode")->check(CLI::IsMember({"basic", "adjusted"}))
      ->capture_default_str();
  c_seq->add_option("--threshold", seq.threshold, "Significance threshold on sr")->capture_default_str();
  c_seq->add_option("--top", seq.top, "Edges in the network export")->capture_default_str();
  c_seq->add_option("--out-dir", seq.out_dir, "Output directory")->required();
  c_seq->add_flag("--force", seq.force, "Overwrite existing outputs");

  CsidArgs csid;
  auto* c_csid = app.add_subcommand("csid", "Build, balance and split the inference dataset");
  c_csid->add_option("--corpus", csid.corpus, "Corpus JSONL")->required()->check(CLI::ExistingFile);
  c_csid->add_option("--taxonomy", csid.taxonomy, "Taxonomy JSONL (default: packaged)")->check(CLI::ExistingFile);
  c_csid->add_option("--prompts", csid.prompts, "Directory with prompt template overrides")
      ->check(CLI::ExistingDirectory);
  c_csid->add_option("--seed", csid.seed, "Seed for balancing and splitting")->required();
  c_csid->add_option("--test-fraction", csid.test_fraction, "Share of cases per label held out")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  c_csid->add_option("--min-context", csid.min_context, "Utterances required before a cut")->capture_default_str();
  c_csid->add_option("--min-predecessors", csid.min_predecessors, "Labeled turns required before a scam cut")
      ->capture_default_str();
  c_csid->add_option("--jobs", csid.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  c_csid->add_option("--out-dir", csid.out_dir, "Output directory")->required();
  c_csid->add_flag("--force", csid.force, "Overwrite existing outputs");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Run detection, prediction and judge scoring against an endpoint");
  c_eval->add_option("--dataset", ev.dataset, "Instance JSONL (e.g. test.jsonl)")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--prompts", ev.prompts, "Directory with prompt template overrides")
      ->check(CLI::ExistingDirectory);
  add_endpoint(c_eval, ev.model, "model", true);
  add_endpoint(c_eval, ev.judge, "judge", false);
  c_eval->add_option("--parse-mode", ev.mode, "Output parsing")->check(CLI::IsMember({"strict", "recover"}))
      ->capture_default_str();
  c_eval->add_option("--seed", ev.seed, "Run seed, recorded in the report")->required();
  c_eval->add_option("--jobs", ev.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  c_eval->add_option("--out-dir", ev.out_dir, "Output directory")->required();
  c_eval->add_flag("--force", ev.force, "Overwrite existing outputs");

  JudgeCorrArgs jc;
  auto* c_jc = app.add_subcommand("judge-corr", "Correlate judge scores with human ratings");
  c_jc->add_option("--report", jc.report, "report.jsonl from eval")->required()->check(CLI::ExistingFile);
  c_jc->add_option("--ratings", jc.ratings, "CSV instance_id,rater_id,score_1_to_7[,target]")
      ->required()
      ->check(CLI::ExistingFile);
  c_jc->add_option("--out", jc.out, "Write the correlation table CSV here");
  c_jc->add_flag("--force", jc.force, "Overwrite existing outputs");

  ExperimentArgs ex;
  auto* c_ex = app.add_subcommand("experiment", "Staged simulation service and analysis");
  c_ex->require_subcommand(1);
  auto* c_serve = c_ex->add_subcommand("serve", "Serve the JSON HTTP API");
  c_serve->add_option("--script", ex.script, "Stimulus script JSON (default: packaged)")->check(CLI::ExistingFile);
  c_serve->add_option("--warnings", ex.warnings, "Warning content JSON (default: packaged)")
      ->check(CLI::ExistingFile);
  c_serve->add_option("--log", ex.log, "Append-only event log")->required();
  c_serve->add_option("--seed", ex.seed, "Assignment seed (must match an existing log)")->required();
  c_serve->add_option("--host", ex.host, "Bind address")->capture_default_str();
  c_serve->add_option("--port", ex.port, "Port")->capture_default_str();
  c_serve->add_option("--bootstrap", ex.bootstrap, "Bootstrap resamples for /analysis")->capture_default_str();

  auto* c_an = c_ex->add_subcommand("analyze", "Grid, trend and test outputs from an event log");
  c_an->add_option("--script", ex.script, "Stimulus script JSON (default: packaged)")->check(CLI::ExistingFile);
  c_an->add_option("--warnings", ex.warnings, "Warning content JSON (default: packaged)")->check(CLI::ExistingFile);
  c_an->add_option("--log", ex.log, "Event log to replay")->required();
  c_an->add_option("--variable", ex.variable, "One of suspicion, importance, relevance, anxiety (default: all)");
  c_an->add_option("--seed", ex.seed, "Bootstrap seed")->required();
  c_an->add_option("--bootstrap", ex.bootstrap, "Bootstrap resamples")->capture_default_str();
  c_an->add_option("--out-dir", ex.out_dir, "Output directory")->required();
  c_an->add_flag("--force", ex.force, "Overwrite existing outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*c_ingest) return do_ingest(ingest, out);
    if (*c_seq) return do_sequences(seq, out);
    if (*c_csid) return do_csid(csid, out);
    if (*c_eval) return do_eval(ev, out);
    if (*c_jc) return do_judge_corr(jc, out);
    if (*c_serve) return do_serve(ex, out);
    if (*c_an) return do_analyze(ex, out);
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return is_validation(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return 2;
  }
  return 1;
}

}  // namespace scriptmind::cli
