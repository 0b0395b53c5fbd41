#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "scriptmind/error.hpp"
#include "scriptmind/stats.hpp"

namespace scriptmind::stats {

namespace {

void check_complete(const Matrix& data) {
  if (data.values.size() != data.rows * data.cols) {
    throw Error(Errc::IncompleteData, "matrix size does not match its shape");
  }
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (std::size_t j = 0; j < data.cols; ++j) {
      if (!std::isfinite(data(i, j))) {
        throw Error(Errc::IncompleteData, "missing or non-finite cell", fmt::format("subject {}, level {}", i, j));
      }
    }
  }
  if (data.cols < 2) throw Error(Errc::InvalidArgument, "need at least two within-subject levels");
}

std::vector<double> col_means(const Matrix& data) {
  std::vector<double> m(data.cols, 0.0);
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (std::size_t j = 0; j < data.cols; ++j) m[j] += data(i, j);
  }
  for (auto& v : m) v /= static_cast<double>(data.rows);
  return m;
}

double row_mean(const Matrix& data, std::size_t i) {
  double s = 0.0;
  for (std::size_t j = 0; j < data.cols; ++j) s += data(i, j);
  return s / static_cast<double>(data.cols);
}

// F and p with the usual degenerate handling: no error variance and no
// effect gives F = 0; no error variance with an effect is undefined.
void fill_f(TestRecord& r, double ss_effect, double df1, double ss_error, double df2) {
  r.ss_effect = ss_effect;
  r.ss_error = ss_error;
  r.df1 = df1;
  r.df2 = df2;
  const double scale = std::max({std::fabs(ss_effect), std::fabs(ss_error), 1.0});
  const double tiny = 1e-12 * scale;
  if (ss_effect < tiny) ss_effect = 0.0;
  if (ss_error < tiny) ss_error = 0.0;
  if (ss_error == 0.0) {
    if (ss_effect == 0.0) {
      r.statistic = 0.0;
      r.p = 1.0;
      r.partial_eta_sq = 0.0;
      return;
    }
    throw Error(Errc::DegenerateGroups, fmt::format("zero error variance for effect '{}'", r.effect));
  }
  r.statistic = (ss_effect / df1) / (ss_error / df2);
  r.p = f_sf(r.statistic, df1, df2);
  r.partial_eta_sq = ss_effect / (ss_effect + ss_error);
}

// Epsilon from a k x k covariance matrix (double-centred form).
double epsilon_from_cov(const std::vector<double>& s, std::size_t k) {
  std::vector<double> row(k, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) row[i] += s[i * k + j];
    grand += row[i];
    row[i] /= static_cast<double>(k);
  }
  grand /= static_cast<double>(k * k);
  double trace = 0.0;
  double sumsq = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double c = s[i * k + j] - row[i] - row[j] + grand;
      if (i == j) trace += c;
      sumsq += c * c;
    }
  }
  if (sumsq <= 0.0 || trace <= 0.0) return 1.0;
  const double eps = trace * trace / (static_cast<double>(k - 1) * sumsq);
  return std::clamp(eps, 1.0 / static_cast<double>(k - 1), 1.0);
}

void apply_gg(TestRecord& r, double eps) {
  r.epsilon_gg = eps;
  r.p_gg = r.statistic == 0.0 ? 1.0 : f_sf(r.statistic, r.df1 * eps, r.df2 * eps);
}

}  // namespace

double greenhouse_geisser_epsilon(const Matrix& data) {
  check_complete(data);
  if (data.rows < 2) return 1.0;
  const auto k = data.cols;
  const auto m = col_means(data);
  std::vector<double> s(k * k, 0.0);
  for (std::size_t i = 0; i < data.rows; ++i) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) s[a * k + b] += (data(i, a) - m[a]) * (data(i, b) - m[b]);
    }
  }
  for (auto& v : s) v /= static_cast<double>(data.rows - 1);
  return epsilon_from_cov(s, k);
}

TestRecord rm_anova(const Matrix& data) {
  check_complete(data);
  if (data.rows < 3) throw Error(Errc::TooFewSubjects, fmt::format("{} subjects, need at least 3", data.rows));
  const double n = static_cast<double>(data.rows);
  const double k = static_cast<double>(data.cols);
  const auto cm = col_means(data);
  const double grand = mean(cm);

  double ss_total = 0.0;
  for (double v : data.values) ss_total += (v - grand) * (v - grand);
  double ss_subjects = 0.0;
  for (std::size_t i = 0; i < data.rows; ++i) {
    const double d = row_mean(data, i) - grand;
    ss_subjects += k * d * d;
  }
  double ss_cond = 0.0;
  for (double m : cm) ss_cond += n * (m - grand) * (m - grand);
  const double ss_error = std::max(0.0, ss_total - ss_subjects - ss_cond);

  TestRecord r;
  r.test = "rm_anova";
  r.effect = "stage";
  fill_f(r, ss_cond, k - 1.0, ss_error, (k - 1.0) * (n - 1.0));
  apply_gg(r, greenhouse_geisser_epsilon(data));
  return r;
}

MixedAnova mixed_anova(const Matrix& data, std::span<const int> group) {
  check_complete(data);
  if (group.size() != data.rows) {
    throw Error(Errc::LengthMismatch, fmt::format("{} group labels for {} subjects", group.size(), data.rows));
  }
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < group.size(); ++i) members[group[i]].push_back(i);
  if (members.size() < 2) throw Error(Errc::SingletonGroup, "need at least two groups");
  for (const auto& [g, idx] : members) {
    if (idx.size() < 3) {
      throw Error(Errc::SingletonGroup, fmt::format("group {} has {} subjects, need at least 3", g, idx.size()));
    }
  }

  const std::size_t k = data.cols;
  const double kd = static_cast<double>(k);
  const double n = static_cast<double>(data.rows);
  const double g = static_cast<double>(members.size());
  const auto cm = col_means(data);
  const double grand = mean(cm);

  double ss_total = 0.0;
  for (double v : data.values) ss_total += (v - grand) * (v - grand);
  double ss_stage = 0.0;
  for (double m : cm) ss_stage += n * (m - grand) * (m - grand);

  double ss_group = 0.0;
  double ss_subj_within = 0.0;
  double ss_cells = 0.0;  // sum over groups of n_g * sum_j (cell - group mean)^2
  std::vector<double> pooled(k * k, 0.0);
  for (const auto& [label, idx] : members) {
    const double ng = static_cast<double>(idx.size());
    std::vector<double> cell(k, 0.0);
    for (auto i : idx) {
      for (std::size_t j = 0; j < k; ++j) cell[j] += data(i, j);
    }
    for (auto& c : cell) c /= ng;
    const double gm = mean(cell);
    ss_group += kd * ng * (gm - grand) * (gm - grand);
    for (auto i : idx) {
      const double d = row_mean(data, i) - gm;
      ss_subj_within += kd * d * d;
    }
    for (double c : cell) ss_cells += ng * (c - gm) * (c - gm);
    for (auto i : idx) {
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) pooled[a * k + b] += (data(i, a) - cell[a]) * (data(i, b) - cell[b]);
      }
    }
  }
  for (auto& v : pooled) v /= n - g;
  const double ss_inter = std::max(0.0, ss_cells - ss_stage);
  const double ss_error = std::max(0.0, ss_total - ss_group - ss_subj_within - ss_stage - ss_inter);
  const double eps = epsilon_from_cov(pooled, k);

  MixedAnova out;
  out.within.test = out.interaction.test = out.between.test = "mixed_anova";
  out.within.effect = "stage";
  out.interaction.effect = "stage_x_group";
  out.between.effect = "group";
  const double df_err = (kd - 1.0) * (n - g);
  fill_f(out.within, ss_stage, kd - 1.0, ss_error, df_err);
  fill_f(out.interaction, ss_inter, (kd - 1.0) * (g - 1.0), ss_error, df_err);
  fill_f(out.between, ss_group, g - 1.0, ss_subj_within, n - g);
  apply_gg(out.within, eps);
  apply_gg(out.interaction, eps);
  return out;
}

namespace {

struct GroupSummary {
  std::vector<double> means;
  std::vector<double> sizes;
  double ss_between = 0.0;
  double ss_within = 0.0;
  double n = 0.0;
};

GroupSummary summarize(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw Error(Errc::DegenerateGroups, "need at least two groups");
  GroupSummary s;
  double total = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].size() < 2) {
      throw Error(Errc::DegenerateGroups, fmt::format("group {} has {} values, need at least 2", i, groups[i].size()));
    }
    for (double v : groups[i]) {
      if (!std::isfinite(v)) throw Error(Errc::IncompleteData, fmt::format("non-finite value in group {}", i));
    }
    s.means.push_back(mean(groups[i]));
    s.sizes.push_back(static_cast<double>(groups[i].size()));
    s.n += s.sizes.back();
    total += s.means.back() * s.sizes.back();
  }
  const double grand = total / s.n;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    s.ss_between += s.sizes[i] * (s.means[i] - grand) * (s.means[i] - grand);
    for (double v : groups[i]) s.ss_within += (v - s.means[i]) * (v - s.means[i]);
  }
  return s;
}

}  // namespace

TestRecord oneway_anova(std::span<const std::vector<double>> groups) {
  const auto s = summarize(groups);
  TestRecord r;
  r.test = "oneway_anova";
  r.effect = "group";
  const double g = static_cast<double>(groups.size());
  fill_f(r, s.ss_between, g - 1.0, s.ss_within, s.n - g);
  return r;
}

std::vector<TukeyPair> tukey_hsd(std::span<const std::vector<double>> groups, double alpha) {
  const auto s = summarize(groups);
  const double g = static_cast<double>(groups.size());
  const double df = s.n - g;
  const double mse = s.ss_within / df;
  std::vector<TukeyPair> out;
  for (std::size_t a = 0; a < groups.size(); ++a) {
    for (std::size_t b = a + 1; b < groups.size(); ++b) {
      TukeyPair p;
      p.a = a;
      p.b = b;
      p.mean_diff = s.means[b] - s.means[a];
      const double se = std::sqrt(mse / 2.0 * (1.0 / s.sizes[a] + 1.0 / s.sizes[b]));
      if (se == 0.0) {
        if (p.mean_diff != 0.0) throw Error(Errc::DegenerateGroups, "zero within-group variance with unequal means");
        p.q = 0.0;
        p.p = 1.0;
      } else {
        p.q = std::fabs(p.mean_diff) / se;
        p.p = std::clamp(1.0 - ptukey(p.q, g, df), 0.0, 1.0);
      }
      p.significant = p.p < alpha;
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace scriptmind::stats
