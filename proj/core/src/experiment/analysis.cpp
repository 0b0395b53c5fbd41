#include "scriptmind/experiment/analysis.hpp"

#include <fmt/format.h>

#include "json_util.hpp"
#include "scriptmind/error.hpp"

namespace scriptmind::experiment {

using detail::format_double;
using detail::ordered_json;

std::string_view to_string(Variable v) noexcept {
  switch (v) {
    case Variable::suspicion: return "suspicion";
    case Variable::importance: return "importance";
    case Variable::relevance: return "relevance";
    case Variable::anxiety: return "anxiety";
  }
  return "suspicion";
}

std::optional<Variable> parse_variable(std::string_view s) noexcept {
  for (auto v : {Variable::suspicion, Variable::importance, Variable::relevance, Variable::anxiety}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

int value_of(const StageResponse& r, Variable v) noexcept {
  switch (v) {
    case Variable::suspicion: return r.suspicion;
    case Variable::importance: return r.importance;
    case Variable::relevance: return r.relevance;
    case Variable::anxiety: return r.anxiety;
  }
  return 0;
}

namespace {

CellStats cell(const std::vector<double>& xs) {
  CellStats c;
  c.n = xs.size();
  if (!xs.empty()) c.mean = stats::mean(xs);
  if (xs.size() >= 2) c.sd = stats::stddev(xs);
  return c;
}

template <typename F>
void attempt(AnalysisExport& out, std::string_view what, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    out.notices.push_back(fmt::format("{} skipped: {}", what, e.what()));
  }
}

ordered_json cell_json(const CellStats& c) {
  ordered_json j;
  j["mean"] = c.mean;
  j["sd"] = c.sd;
  j["n"] = c.n;
  return j;
}

ordered_json test_json(const stats::TestRecord& t) {
  ordered_json j;
  j["test"] = t.test;
  j["effect"] = t.effect;
  j["statistic"] = t.statistic;
  j["df1"] = t.df1;
  j["df2"] = t.df2;
  j["p"] = t.p;
  if (t.test == "ttest_independent") {
    j["cohens_d"] = t.cohens_d.value_or(0.0);
  } else {
    j["partial_eta_sq"] = t.partial_eta_sq;
  }
  if (t.epsilon_gg) j["epsilon_gg"] = *t.epsilon_gg;
  if (t.p_gg) j["p_gg"] = *t.p_gg;
  if (t.ci_low && t.ci_high) j["ci"] = {*t.ci_low, *t.ci_high};
  return j;
}

}  // namespace

AnalysisExport export_analysis(std::span<const Session> sessions, Variable variable, const AnalysisOptions& options) {
  AnalysisExport out;
  out.variable = variable;
  std::vector<const Session*> done;
  for (const auto& s : sessions) {
    if (s.completed()) {
      done.push_back(&s);
    } else {
      ++out.excluded_incomplete;
    }
  }
  out.completed = done.size();
  if (done.empty()) throw Error(Errc::NoCompletedSessions, "no completed sessions to analyze");
  if (out.excluded_incomplete) {
    out.notices.push_back(fmt::format("{} incomplete session(s) excluded", out.excluded_incomplete));
  }

  // Subject x stage matrix, subjects in input order.
  stats::Matrix data{done.size(), kStageCount, std::vector<double>(done.size() * kStageCount)};
  std::vector<int> group_of(done.size());
  for (std::size_t i = 0; i < done.size(); ++i) {
    for (const auto& r : done[i]->responses) data(i, static_cast<std::size_t>(r.stage - 1)) = value_of(r, variable);
    group_of[i] = static_cast<int>(done[i]->condition);
  }

  for (auto c : kConditions) {
    std::array<std::vector<double>, kStageCount> cols;
    for (std::size_t i = 0; i < done.size(); ++i) {
      if (done[i]->condition != c) continue;
      for (std::size_t s = 0; s < kStageCount; ++s) cols[s].push_back(data(i, s));
    }
    if (cols[0].empty()) continue;
    out.groups.push_back(c);
    auto& row = out.grid.emplace_back();
    for (std::size_t s = 0; s < kStageCount; ++s) row[s] = cell(cols[s]);
  }

  std::array<std::vector<double>, kStageCount> stage_cols;
  for (std::size_t i = 0; i < done.size(); ++i) {
    for (std::size_t s = 0; s < kStageCount; ++s) stage_cols[s].push_back(data(i, s));
  }
  for (std::size_t s = 0; s < kStageCount; ++s) out.overall[s] = cell(stage_cols[s]);

  attempt(out, "rm_anova", [&] { out.tests.push_back(stats::rm_anova(data)); });
  attempt(out, "stage tukey_hsd", [&] {
    const std::vector<std::vector<double>> groups(stage_cols.begin(), stage_cols.end());
    for (const auto& p : stats::tukey_hsd(groups)) {
      out.stage_tukey.push_back({static_cast<int>(p.a) + 1, static_cast<int>(p.b) + 1, p});
    }
  });

  if (out.groups.size() < 2) {
    out.notices.push_back("single group: between-group tests skipped");
    return out;
  }

  for (std::size_t s = 0; s < kStageCount; ++s) {
    attempt(out, fmt::format("stage {} oneway_anova", s + 1), [&] {
      std::vector<std::vector<double>> groups;
      for (auto c : out.groups) {
        auto& g = groups.emplace_back();
        for (std::size_t i = 0; i < done.size(); ++i) {
          if (done[i]->condition == c) g.push_back(data(i, s));
        }
      }
      auto t = stats::oneway_anova(groups);
      t.effect = fmt::format("stage{}", s + 1);
      out.tests.push_back(std::move(t));
    });
  }

  attempt(out, "mixed_anova", [&] {
    const auto m = stats::mixed_anova(data, group_of);
    out.tests.push_back(m.within);
    out.tests.push_back(m.interaction);
    out.tests.push_back(m.between);
  });

  const auto has = [&](Condition c) { return std::find(out.groups.begin(), out.groups.end(), c) != out.groups.end(); };
  if (has(Condition::single_warning) && has(Condition::control)) {
    attempt(out, "ttest_independent", [&] {
      std::vector<double> a, b;
      for (std::size_t i = 0; i < done.size(); ++i) {
        double sum = 0.0;
        for (std::size_t s = 0; s < kStageCount; ++s) sum += data(i, s);
        const double m = sum / kStageCount;
        if (done[i]->condition == Condition::single_warning) a.push_back(m);
        if (done[i]->condition == Condition::control) b.push_back(m);
      }
      auto t = stats::ttest_independent(a, b, options.bootstrap_resamples, options.seed);
      t.effect = "single_warning_vs_control";
      out.tests.push_back(std::move(t));
    });
  } else {
    out.notices.push_back("single_warning vs control t test skipped: a group is missing");
  }
  return out;
}

std::string grid_csv(const AnalysisExport& a) {
  std::string out = fmt::format(
      "# variable={}; raw 1-7 scores (suspicion: 1-3 investigator, 5-7 scammer); N={} completed, {} incomplete "
      "excluded\n",
      to_string(a.variable), a.completed, a.excluded_incomplete);
  out += "stage";
  for (auto g : a.groups) out += fmt::format(",{0}_mean,{0}_sd,{0}_n", to_string(g));
  out += ",F,p\n";
  for (int s = 1; s <= kStageCount; ++s) {
    out += std::to_string(s);
    for (const auto& row : a.grid) {
      const auto& c = row[static_cast<std::size_t>(s - 1)];
      out += fmt::format(",{},{},{}", format_double(c.mean), format_double(c.sd), c.n);
    }
    const auto effect = fmt::format("stage{}", s);
    const auto it = std::find_if(a.tests.begin(), a.tests.end(), [&](const stats::TestRecord& t) {
      return t.test == "oneway_anova" && t.effect == effect;
    });
    if (it != a.tests.end()) {
      out += fmt::format(",{},{}\n", format_double(it->statistic), format_double(it->p));
    } else {
      out += ",,\n";
    }
  }
  return out;
}

std::string trend_csv(const AnalysisExport& a) {
  std::string out = "stage,group,mean,sd,n\n";
  for (int s = 1; s <= kStageCount; ++s) {
    const auto si = static_cast<std::size_t>(s - 1);
    for (std::size_t g = 0; g < a.groups.size(); ++g) {
      const auto& c = a.grid[g][si];
      out += fmt::format("{},{},{},{},{}\n", s, to_string(a.groups[g]), format_double(c.mean), format_double(c.sd),
                         c.n);
    }
    const auto& c = a.overall[si];
    out += fmt::format("{},all,{},{},{}\n", s, format_double(c.mean), format_double(c.sd), c.n);
  }
  return out;
}

std::string analysis_json(const AnalysisExport& a) {
  ordered_json j;
  j["variable"] = to_string(a.variable);
  j["n_completed"] = a.completed;
  j["n_excluded_incomplete"] = a.excluded_incomplete;
  j["groups"] = ordered_json::array();
  for (std::size_t g = 0; g < a.groups.size(); ++g) {
    ordered_json gj;
    gj["group"] = to_string(a.groups[g]);
    gj["stages"] = ordered_json::array();
    for (const auto& c : a.grid[g]) gj["stages"].push_back(cell_json(c));
    j["groups"].push_back(gj);
  }
  j["overall"] = ordered_json::array();
  for (const auto& c : a.overall) j["overall"].push_back(cell_json(c));
  j["tests"] = ordered_json::array();
  for (const auto& t : a.tests) j["tests"].push_back(test_json(t));
  j["stage_tukey"] = ordered_json::array();
  for (const auto& t : a.stage_tukey) {
    ordered_json tj;
    tj["stage_a"] = t.stage_a;
    tj["stage_b"] = t.stage_b;
    tj["mean_diff"] = t.pair.mean_diff;
    tj["q"] = t.pair.q;
    tj["p"] = t.pair.p;
    tj["significant"] = t.pair.significant;
    j["stage_tukey"].push_back(tj);
  }
  j["notices"] = a.notices;
  return j.dump(2) + "\n";
}

}  // namespace scriptmind::experiment
