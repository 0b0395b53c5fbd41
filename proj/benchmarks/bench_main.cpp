#include <benchmark/benchmark.h>

#include "scriptmind/corpus.hpp"
#include "scriptmind/prompt.hpp"
#include "scriptmind/rng.hpp"
#include "scriptmind/sequence.hpp"
#include "scriptmind/stats.hpp"

using namespace scriptmind;

namespace {

const Taxonomy& taxonomy() {
  static const Taxonomy tax = Taxonomy::load(resource_dir() / "taxonomy.jsonl");
  return tax;
}

// Synthetic labeled corpus: `cases` scam cases with `turns` scammer turns each.
Corpus synthetic(std::size_t cases, std::size_t turns) {
  const auto& codes = taxonomy().codes();
  SeededRng rng(1);
  Corpus c;
  for (std::size_t i = 0; i < cases; ++i) {
    ScamCase sc;
    sc.case_id = "c" + std::to_string(i);
    sc.label = Label::scam;
    sc.scenario = Scenario::prosecutor_impersonation;
    for (std::size_t t = 0; t < turns; ++t) {
      sc.utterances.push_back({sc.case_id, 2 * t, Speaker::scammer, "x"});
      sc.utterances.push_back({sc.case_id, 2 * t + 1, Speaker::user, "y"});
      c.sbs.push_back({sc.case_id, 2 * t, codes[rng.below(codes.size())], true});
    }
    c.cases.push_back(std::move(sc));
  }
  return c;
}

void BM_TransitionMatrix(benchmark::State& state) {
  const auto corpus = synthetic(static_cast<std::size_t>(state.range(0)), 30);
  for (auto _ : state) benchmark::DoNotOptimize(build_transition_matrix(corpus));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 30);
}
BENCHMARK(BM_TransitionMatrix)->Arg(100)->Arg(1000);

void BM_StandardizedResiduals(benchmark::State& state) {
  const auto m = build_transition_matrix(synthetic(1000, 30));
  for (auto _ : state) benchmark::DoNotOptimize(make_sequence_report(m, ResidualMode::adjusted));
}
BENCHMARK(BM_StandardizedResiduals);

void BM_RmAnova(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SeededRng rng(2);
  stats::Matrix data{n, 5, std::vector<double>(n * 5)};
  for (auto& v : data.values) v = 1.0 + static_cast<double>(rng.below(7));
  for (auto _ : state) benchmark::DoNotOptimize(stats::rm_anova(data));
}
BENCHMARK(BM_RmAnova)->Arg(90)->Arg(1000);

void BM_Ptukey(benchmark::State& state) {
  double q = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::ptukey(q, 5, 40));
    q = q > 6.0 ? 0.5 : q + 0.37;
  }
}
BENCHMARK(BM_Ptukey);

}  // namespace
BENCHMARK_MAIN();
