#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scriptmind/experiment/session.hpp"
#include "scriptmind/stats.hpp"

namespace scriptmind::experiment {

enum class Variable { suspicion, importance, relevance, anxiety };

std::string_view to_string(Variable v) noexcept;
std::optional<Variable> parse_variable(std::string_view s) noexcept;
int value_of(const StageResponse& r, Variable v) noexcept;

struct CellStats {
  double mean = 0.0;
  double sd = 0.0;  // n - 1 denominator; 0 when n < 2
  std::size_t n = 0;
};

struct StageTukey {
  int stage_a = 0;
  int stage_b = 0;
  stats::TukeyPair pair;
};

struct AnalysisExport {
  Variable variable = Variable::suspicion;
  std::size_t completed = 0;
  std::size_t excluded_incomplete = 0;
  std::vector<Condition> groups;  // groups with completed sessions, enum order
  /// grid[g][s]: stats of stage s+1 within groups[g].
  std::vector<std::array<CellStats, kStageCount>> grid;
  std::array<CellStats, kStageCount> overall;
  std::vector<stats::TestRecord> tests;
  std::vector<StageTukey> stage_tukey;
  std::vector<std::string> notices;
};

struct AnalysisOptions {
  std::size_t bootstrap_resamples = 5000;
  std::uint64_t seed = 0;
};

/// NoCompletedSessions when nothing is complete. Tests that need two or
/// more groups are skipped with a notice when they cannot run.
AnalysisExport export_analysis(std::span<const Session> sessions, Variable variable,
                               const AnalysisOptions& options = {});

/// Stage rows, one mean/sd/n column triple per group, plus stage-wise F and p.
std::string grid_csv(const AnalysisExport& a);
/// Long format for trend plots: stage,group,mean,sd,n (group "all" included).
std::string trend_csv(const AnalysisExport& a);
std::string analysis_json(const AnalysisExport& a);

}  // namespace scriptmind::experiment
