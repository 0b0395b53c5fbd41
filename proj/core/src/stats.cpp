#include "scriptmind/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "scriptmind/error.hpp"
#include "scriptmind/rng.hpp"

namespace scriptmind::stats {

namespace bm = boost::math;

double f_sf(double f, double df1, double df2) {
  if (std::isnan(f)) return 1.0;
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return bm::cdf(bm::complement(bm::fisher_f_distribution<double>(df1, df2), f));
}

double t_two_sided(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  const double p = 2.0 * bm::cdf(bm::complement(bm::students_t_distribution<double>(df), std::fabs(t)));
  return std::min(1.0, p);
}

double chi2_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return bm::cdf(bm::complement(bm::chi_squared_distribution<double>(df), x));
}

double mean(std::span<const double> x) {
  if (x.empty()) throw Error(Errc::EmptyInput, "mean of an empty sample");
  // Two-pass: naive sum then a correction term.
  double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double c = 0.0;
  for (double v : x) c += v - m;
  return m + c / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.size() < 2) throw Error(Errc::EmptyInput, "variance needs at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error(Errc::EmptyInput, "quantile of an empty sample");
  if (p <= 0.0) return sorted.front();
  if (p >= 1.0) return sorted.back();
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

TestRecord ttest_independent(std::span<const double> a, std::span<const double> b, std::size_t bootstrap_resamples,
                             std::uint64_t seed, double confidence) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(Errc::DegenerateGroups, "t test needs at least two values per group");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(Errc::InvalidArgument, "confidence must be in (0, 1)");
  }
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double ma = mean(a);
  const double mb = mean(b);
  const double df = na + nb - 2.0;
  const double pooled_var = ((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / df;
  const double diff = ma - mb;

  TestRecord r;
  r.test = "ttest_independent";
  r.effect = "between";
  r.df1 = df;
  if (pooled_var == 0.0) {
    if (diff != 0.0) throw Error(Errc::DegenerateGroups, "zero within-group variance with unequal means");
    r.statistic = 0.0;
    r.p = 1.0;
    r.cohens_d = 0.0;
  } else {
    const double se = std::sqrt(pooled_var * (1.0 / na + 1.0 / nb));
    r.statistic = diff / se;
    r.p = t_two_sided(r.statistic, df);
    r.cohens_d = diff / std::sqrt(pooled_var);
  }

  if (bootstrap_resamples > 0) {
    SeededRng rng(seed);
    std::vector<double> diffs(bootstrap_resamples);
    for (auto& d : diffs) {
      double sa = 0.0;
      double sb = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) sa += a[rng.below(a.size())];
      for (std::size_t i = 0; i < b.size(); ++i) sb += b[rng.below(b.size())];
      d = sa / na - sb / nb;
    }
    std::sort(diffs.begin(), diffs.end());
    const double tail = (1.0 - confidence) / 2.0;
    r.ci_low = quantile_sorted(diffs, tail);
    r.ci_high = quantile_sorted(diffs, 1.0 - tail);
  }
  return r;
}

}  // namespace scriptmind::stats
