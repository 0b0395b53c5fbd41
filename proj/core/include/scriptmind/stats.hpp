#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scriptmind::stats {

// Distribution tails. All return values in [0, 1].
double f_sf(double f, double df1, double df2);      // P(F > f)
double t_two_sided(double t, double df);             // P(|T| > |t|)
double chi2_sf(double x, double df);                 // P(X > x)

/// Studentized range distribution P(Q <= q) for `groups` means and `df`
/// error degrees of freedom (Copenhaver & Holland quadrature).
double ptukey(double q, double groups, double df);

double mean(std::span<const double> x);
/// Sample variance (n - 1 denominator).
double variance(std::span<const double> x);
double stddev(std::span<const double> x);
/// Linear-interpolation quantile of a sorted sample (Hyndman-Fan type 7).
double quantile_sorted(std::span<const double> sorted, double p);

/// One effect of an ANOVA table, or a single t test.
struct TestRecord {
  std::string test;    // e.g. "rm_anova", "mixed_anova", "oneway_anova", "ttest_independent"
  std::string effect;  // e.g. "stage", "stage_x_group", "group", "between"
  double statistic = 0.0;  // F or t
  double df1 = 0.0;
  double df2 = 0.0;        // 0 for t tests (df in df1)
  double p = 1.0;
  double partial_eta_sq = 0.0;  // F tests
  std::optional<double> cohens_d;
  std::optional<double> epsilon_gg;  // Greenhouse-Geisser, within effects
  std::optional<double> p_gg;
  std::optional<double> ci_low;  // bootstrap CI of the mean difference
  std::optional<double> ci_high;
  double ss_effect = 0.0;
  double ss_error = 0.0;
};

/// Subjects x conditions matrix, row-major.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
};

/// Greenhouse-Geisser epsilon from the sample covariance of the columns.
double greenhouse_geisser_epsilon(const Matrix& data);

/// One-factor within-subjects ANOVA. Needs >= 3 subjects and >= 2 levels with
/// no missing (NaN) cells.
TestRecord rm_anova(const Matrix& data);

struct MixedAnova {
  TestRecord within;       // stage
  TestRecord interaction;  // stage x group
  TestRecord between;      // group
};

/// Split-plot ANOVA: `data` rows are subjects, columns the within factor;
/// `group[i]` is subject i's between-subjects level (any integer labels).
MixedAnova mixed_anova(const Matrix& data, std::span<const int> group);

TestRecord oneway_anova(std::span<const std::vector<double>> groups);

struct TukeyPair {
  std::size_t a = 0;
  std::size_t b = 0;
  double mean_diff = 0.0;  // mean(b) - mean(a)
  double q = 0.0;
  double p = 1.0;
  bool significant = false;
};

/// All unordered pairs a < b with Tukey-Kramer standard errors.
std::vector<TukeyPair> tukey_hsd(std::span<const std::vector<double>> groups, double alpha = 0.05);

/// Pooled-variance two-sample t test, Cohen's d on the pooled SD, and a
/// seeded percentile-bootstrap CI for mean(a) - mean(b).
TestRecord ttest_independent(std::span<const double> a, std::span<const double> b, std::size_t bootstrap_resamples,
                             std::uint64_t seed, double confidence = 0.95);

}  // namespace scriptmind::stats
