#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scriptmind/corpus.hpp"

namespace scriptmind {

/// Dense row-major grid of reals.
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
};

/// Intent-to-intent transition counts (row = from, column = to).
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  /// `counts` is row-major k*k with k = states.size(); totals are derived.
  TransitionMatrix(std::vector<IntentCode> states, std::vector<std::int64_t> counts);

  std::size_t size() const noexcept { return states_.size(); }
  const std::vector<IntentCode>& states() const noexcept { return states_; }
  std::int64_t count(std::size_t from, std::size_t to) const { return counts_[from * states_.size() + to]; }
  const std::vector<std::int64_t>& counts() const noexcept { return counts_; }
  const std::vector<std::int64_t>& row_totals() const noexcept { return row_totals_; }
  const std::vector<std::int64_t>& col_totals() const noexcept { return col_totals_; }
  std::int64_t grand_total() const noexcept { return grand_total_; }
  /// Index of `code` in states(), or size() if absent.
  std::size_t index_of(const IntentCode& code) const noexcept;

 private:
  std::vector<IntentCode> states_;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> row_totals_;
  std::vector<std::int64_t> col_totals_;
  std::int64_t grand_total_ = 0;
};

enum class ResidualMode { basic, adjusted };
std::string_view to_string(ResidualMode m) noexcept;

struct SrCell {
  IntentCode from;
  IntentCode to;
  std::int64_t observed = 0;
  double expected = 0.0;
  double sr = 0.0;
};

struct SequenceReport {
  std::vector<SrCell> cells;  // sr descending, ties by (from, to)
  double threshold = 2.0;
  std::size_t significant_count = 0;
  ResidualMode mode = ResidualMode::basic;
  std::size_t omitted_cells = 0;  // cells without a finite residual (E = 0)
};

/// Counts adjacent primary intents of consecutive scammer records within each
/// case; user turns between them are skipped and nothing crosses a case
/// boundary. States are the intents that occur, in code order.
TransitionMatrix build_transition_matrix(std::span<const SbsRecord> sbs, const Corpus& corpus);
TransitionMatrix build_transition_matrix(const Corpus& corpus);

/// Independence model: E_ij = row_i * col_j / N.
Grid expected_counts(const TransitionMatrix& m);

/// basic: (O - E) / sqrt(E); adjusted: (O - E) / sqrt(E (1 - r/N)(1 - c/N)).
/// Row-major order; cells without a finite residual are left out.
std::vector<SrCell> standardized_residuals(const TransitionMatrix& m, ResidualMode mode);

SequenceReport make_sequence_report(const TransitionMatrix& m, ResidualMode mode, double threshold = 2.0);

/// Strict total order used by reports: sr descending, then (from, to).
bool sr_order(const SrCell& a, const SrCell& b) noexcept;

std::vector<SrCell> significant_transitions(const SequenceReport& report, double threshold = 2.0);
std::vector<SrCell> top_k_transitions(const SequenceReport& report, std::size_t k);

enum class NetworkFormat { dot, json };

/// Directed transition network; nodes are deduplicated intent codes in code
/// order, one edge per cell in input order. Output is byte-stable.
std::string export_network(std::span<const SrCell> cells, NetworkFormat format);

/// CSV with header `from,to,count,expected,sr`.
std::string export_sr_csv(std::span<const SrCell> cells);

}  // namespace scriptmind
