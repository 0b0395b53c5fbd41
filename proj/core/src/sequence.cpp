#include "scriptmind/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "scriptmind/error.hpp"

namespace scriptmind {

std::string_view to_string(ResidualMode m) noexcept {
  return m == ResidualMode::basic ? "basic" : "adjusted";
}

TransitionMatrix::TransitionMatrix(std::vector<IntentCode> states, std::vector<std::int64_t> counts)
    : states_(std::move(states)), counts_(std::move(counts)) {
  const std::size_t k = states_.size();
  if (k == 0) throw Error(Errc::InvalidArgument, "transition matrix needs at least one state");
  if (counts_.size() != k * k) throw Error(Errc::InvalidArgument, "counts must be k*k");
  row_totals_.assign(k, 0);
  col_totals_.assign(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto c = counts_[i * k + j];
      if (c < 0) throw Error(Errc::InvalidArgument, "negative transition count");
      row_totals_[i] += c;
      col_totals_[j] += c;
      grand_total_ += c;
    }
  }
}

std::size_t TransitionMatrix::index_of(const IntentCode& code) const noexcept {
  auto it = std::lower_bound(states_.begin(), states_.end(), code);
  if (it == states_.end() || *it != code) return states_.size();
  return static_cast<std::size_t>(it - states_.begin());
}

TransitionMatrix build_transition_matrix(std::span<const SbsRecord> sbs, const Corpus& corpus) {
  // Primary intents per case, in turn order.
  std::map<std::string, std::vector<std::pair<std::size_t, IntentCode>>> sequences;
  for (const auto& r : sbs) {
    if (!r.primary) continue;
    sequences[r.case_id].emplace_back(r.turn_index, r.intent);
  }
  if (sequences.empty()) throw Error(Errc::EmptySbs, "no primary SBS records");

  std::vector<IntentCode> states;
  for (auto& [case_id, seq] : sequences) {
    const ScamCase* sc = corpus.find_case(case_id);
    if (sc == nullptr) throw Error(Errc::InvalidArgument, "SBS record for unknown case", case_id);
    std::stable_sort(seq.begin(), seq.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [turn, code] : seq) {
      if (turn >= sc->utterances.size() || sc->utterances[turn].speaker != Speaker::scammer) {
        throw Error(Errc::NonScammerUtterance, "SBS record is not a scammer turn",
                    case_id + "#" + std::to_string(turn));
      }
      states.push_back(code);
    }
  }
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());

  const std::size_t k = states.size();
  std::vector<std::int64_t> counts(k * k, 0);
  auto index = [&](const IntentCode& c) {
    return static_cast<std::size_t>(std::lower_bound(states.begin(), states.end(), c) - states.begin());
  };
  for (const auto& [case_id, seq] : sequences) {
    for (std::size_t t = 1; t < seq.size(); ++t) {
      counts[index(seq[t - 1].second) * k + index(seq[t].second)] += 1;
    }
  }
  return TransitionMatrix(std::move(states), std::move(counts));
}

TransitionMatrix build_transition_matrix(const Corpus& corpus) {
  return build_transition_matrix(corpus.sbs, corpus);
}

Grid expected_counts(const TransitionMatrix& m) {
  const auto n = m.grand_total();
  if (n <= 0) throw Error(Errc::ZeroTotal, "transition matrix has no transitions");
  const std::size_t k = m.size();
  Grid e{k, k, std::vector<double>(k * k)};
  const double total = static_cast<double>(n);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      e(i, j) = static_cast<double>(m.row_totals()[i]) * static_cast<double>(m.col_totals()[j]) / total;
    }
  }
  return e;
}

std::vector<SrCell> standardized_residuals(const TransitionMatrix& m, ResidualMode mode) {
  const Grid e = expected_counts(m);
  const double n = static_cast<double>(m.grand_total());
  const std::size_t k = m.size();
  std::vector<SrCell> cells;
  cells.reserve(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double expected = e(i, j);
      if (!(expected > 0.0)) continue;
      double variance = expected;
      if (mode == ResidualMode::adjusted) {
        variance *= (1.0 - static_cast<double>(m.row_totals()[i]) / n) *
                    (1.0 - static_cast<double>(m.col_totals()[j]) / n);
        if (!(variance > 0.0)) continue;
      }
      const auto observed = m.count(i, j);
      const double sr = (static_cast<double>(observed) - expected) / std::sqrt(variance);
      cells.push_back(SrCell{m.states()[i], m.states()[j], observed, expected, sr});
    }
  }
  return cells;
}

bool sr_order(const SrCell& a, const SrCell& b) noexcept {
  if (a.sr != b.sr) return a.sr > b.sr;
  if (a.from != b.from) return a.from < b.from;
  return a.to < b.to;
}

SequenceReport make_sequence_report(const TransitionMatrix& m, ResidualMode mode, double threshold) {
  SequenceReport report;
  report.mode = mode;
  report.threshold = threshold;
  report.cells = standardized_residuals(m, mode);
  report.omitted_cells = m.size() * m.size() - report.cells.size();
  std::sort(report.cells.begin(), report.cells.end(), sr_order);
  report.significant_count = static_cast<std::size_t>(std::count_if(
      report.cells.begin(), report.cells.end(), [&](const SrCell& c) { return c.sr >= threshold; }));
  return report;
}

std::vector<SrCell> significant_transitions(const SequenceReport& report, double threshold) {
  std::vector<SrCell> out;
  std::copy_if(report.cells.begin(), report.cells.end(), std::back_inserter(out),
               [&](const SrCell& c) { return c.sr >= threshold; });
  return out;
}

std::vector<SrCell> top_k_transitions(const SequenceReport& report, std::size_t k) {
  const auto n = std::min(k, report.cells.size());
  return {report.cells.begin(), report.cells.begin() + static_cast<std::ptrdiff_t>(n)};
}

}  // namespace scriptmind
