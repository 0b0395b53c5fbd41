#include <doctest.h>

#include "scriptmind/error.hpp"
#include "scriptmind/stats.hpp"
#include "test_support.hpp"

using namespace scriptmind;
using namespace scriptmind::stats;
namespace t = scriptmind::testing;

namespace {

const t::json& oracle() {
  static const auto doc = t::read_json(t::data_dir() / "stats_oracle.json");
  return doc;
}

Errc error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected scriptmind::Error");
  return Errc::InvalidArgument;
}

void check_effect(const TestRecord& r, const t::json& want) {
  CHECK(std::abs(r.statistic - want["F"].get<double>()) < 1e-6);
  CHECK(r.df1 == want["df1"].get<double>());
  CHECK(r.df2 == want["df2"].get<double>());
  CHECK(std::abs(r.p - want["p"].get<double>()) < 1e-6);
}

// Matrix whose column j is moment matched to (means[j], sds[j]).
Matrix matched_columns(const std::vector<double>& means, const std::vector<double>& sds, std::size_t n,
                       std::uint64_t seed) {
  Matrix m;
  m.rows = n;
  m.cols = means.size();
  m.values.resize(n * m.cols);
  for (std::size_t j = 0; j < m.cols; ++j) {
    const auto col = t::moment_matched(means[j], sds[j], n, seed + j);
    for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
  }
  return m;
}

}  // namespace

TEST_CASE("distribution helpers") {
  CHECK(f_sf(0.0, 2, 10) == 1.0);
  CHECK(t_two_sided(0.0, 10) == doctest::Approx(1.0));
  CHECK(chi2_sf(0.0, 3) == 1.0);
  // the 16/12-node quadrature is good to a few 1e-8 against scipy's integrator
  for (const auto& c : oracle()["ptukey"]) {
    const double got = ptukey(c["q"].get<double>(), c["groups"].get<double>(), c["df"].get<double>());
    CHECK(std::abs(got - c["cdf"].get<double>()) < 1e-7);
  }
  std::vector<double> s{1, 2, 3, 4};
  CHECK(quantile_sorted(s, 0.5) == 2.5);
  CHECK(quantile_sorted(s, 0.0) == 1.0);
  CHECK(quantile_sorted(s, 1.0) == 4.0);
  CHECK(variance(s) == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("rm_anova") {
  for (const auto& c : oracle()["rm_anova"]) check_effect(rm_anova(t::to_matrix(c["data"])), c);
  check_effect(rm_anova(t::to_matrix(oracle()["rm_fixed"]["data"])), oracle()["rm_fixed"]);

  Matrix flat;
  flat.rows = 4;
  flat.cols = 3;
  flat.values = {1, 1, 1, 2, 2, 2, 5, 5, 5, 3, 3, 3};
  const auto r = rm_anova(flat);
  CHECK(r.statistic == 0.0);
  CHECK(r.p == 1.0);

  const auto big = matched_columns({5.0, 4.5, 4.0, 5.5, 5.2}, {1.6, 1.7, 2.0, 1.6, 2.0}, 90, 3);
  const auto shape = rm_anova(big);
  CHECK(shape.df1 == 4);
  CHECK(shape.df2 == 356);
  REQUIRE(shape.epsilon_gg.has_value());
  CHECK(*shape.epsilon_gg >= 0.25);
  CHECK(*shape.epsilon_gg <= 1.0);

  Matrix two = flat;
  two.rows = 2;
  two.values.resize(6);
  CHECK(error_code([&] { rm_anova(two); }) == Errc::TooFewSubjects);
  Matrix holes = flat;
  holes.values[4] = std::nan("");
  CHECK(error_code([&] { rm_anova(holes); }) == Errc::IncompleteData);
}

TEST_CASE("mixed_anova") {
  for (const auto& c : oracle()["mixed_anova"]) {
    const auto groups = c["group"].get<std::vector<int>>();
    const auto r = mixed_anova(t::to_matrix(c["data"]), groups);
    check_effect(r.within, c["within"]);
    check_effect(r.interaction, c["interaction"]);
    check_effect(r.between, c["between"]);
  }

  // N = 90 in three groups of 30
  const auto data = matched_columns({5.0, 4.5, 4.0, 5.5, 5.2}, {1.6, 1.7, 2.0, 1.6, 2.0}, 90, 8);
  std::vector<int> group(90);
  for (std::size_t i = 0; i < 90; ++i) group[i] = static_cast<int>(i % 3);
  const auto r = mixed_anova(data, group);
  CHECK(r.interaction.df1 == 8);
  CHECK(r.interaction.df2 == 348);
  CHECK(r.within.df1 == 4);
  CHECK(r.within.df2 == 348);
  CHECK(r.between.df1 == 2);
  CHECK(r.between.df2 == 87);

  // identical groups sharing a stage trend: no interaction
  Matrix same;
  same.rows = 6;
  same.cols = 3;
  same.values = {1, 2, 3, 2, 3, 5, 3, 5, 6, 1, 2, 3, 2, 3, 5, 3, 5, 6};
  const std::vector<int> g2{0, 0, 0, 1, 1, 1};
  const auto flat = mixed_anova(same, g2);
  CHECK(std::abs(flat.interaction.statistic) < 1e-12);
  CHECK(flat.within.statistic > 1.0);

  const std::vector<int> short_labels{0, 0, 1};
  CHECK(error_code([&] { mixed_anova(same, short_labels); }) == Errc::LengthMismatch);
  const std::vector<int> singleton{0, 0, 0, 0, 0, 1};
  CHECK(error_code([&] { mixed_anova(same, singleton); }) == Errc::SingletonGroup);
}

TEST_CASE("oneway_anova") {
  for (const auto& c : oracle()["oneway_anova"]) {
    const auto groups = t::to_groups(c["groups"]);
    check_effect(oneway_anova(groups), c);
  }
  std::vector<std::vector<double>> same{{1, 2, 3}, {1, 2, 3}, {1, 2, 3}};
  CHECK(oneway_anova(same).statistic == 0.0);

  // reported stage-4 group means and SDs, moment matched
  std::vector<std::vector<double>> stage4{t::moment_matched(6.27, 1.60, 30, 1), t::moment_matched(6.00, 1.49, 30, 2),
                                          t::moment_matched(5.23, 1.72, 30, 3)};
  const auto r = oneway_anova(stage4);
  CHECK(r.statistic == doctest::Approx(3.36).epsilon(0.05 / 3.36));
  CHECK(r.df1 == 2);
  CHECK(r.df2 == 87);

  std::vector<std::vector<double>> lonely{{1, 2}, {3}};
  CHECK(error_code([&] { oneway_anova(lonely); }) == Errc::DegenerateGroups);
}

TEST_CASE("tukey_hsd") {
  for (const auto& c : oracle()["tukey_hsd"]) {
    const auto pairs = tukey_hsd(t::to_groups(c["groups"]));
    REQUIRE(pairs.size() == c["pairs"].size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& w = c["pairs"][i];
      CHECK(pairs[i].a == w["a"].get<std::size_t>());
      CHECK(pairs[i].b == w["b"].get<std::size_t>());
      CHECK(std::abs(pairs[i].mean_diff - w["mean_diff"].get<double>()) < 1e-9);
      CHECK(std::abs(pairs[i].q - w["q"].get<double>()) < 1e-4);
      CHECK(std::abs(pairs[i].p - w["p"].get<double>()) < 1e-6);
    }
  }
  std::vector<std::vector<double>> same{{1, 2, 3}, {1, 2, 3}, {1, 2, 3}};
  for (const auto& p : tukey_hsd(same)) {
    CHECK(p.mean_diff == 0.0);
    CHECK_FALSE(p.significant);
  }

  // reported stage means, pooled over the three groups
  const std::vector<double> means{(5.63 + 5.40 + 5.07) / 3, (5.60 + 4.77 + 4.80) / 3, (4.63 + 3.87 + 4.13) / 3,
                                  (6.27 + 6.00 + 5.23) / 3, (5.73 + 5.63 + 4.43) / 3};
  std::vector<std::vector<double>> stages;
  for (std::size_t s = 0; s < 5; ++s) stages.push_back(t::moment_matched(means[s], 1.9, 90, 40 + s));
  const auto pairs = tukey_hsd(stages);
  auto diff = [&](std::size_t a, std::size_t b) {
    for (const auto& p : pairs) {
      if (p.a == a && p.b == b) return p.mean_diff;
    }
    return std::nan("");
  };
  CHECK(diff(0, 2) == doctest::Approx(-1.16).epsilon(0.005 / 1.16));
  CHECK(diff(0, 1) == doctest::Approx(-0.31).epsilon(0.005 / 0.31));
  CHECK(diff(0, 3) == doctest::Approx(0.47).epsilon(0.005 / 0.47));
  CHECK(diff(0, 4) == doctest::Approx(-0.10).epsilon(0.005 / 0.10));
  CHECK(diff(1, 2) == doctest::Approx(-0.84).epsilon(0.01 / 0.84));
}

TEST_CASE("ttest_independent") {
  for (const auto& c : oracle()["ttest_independent"]) {
    const auto a = c["a"].get<std::vector<double>>();
    const auto b = c["b"].get<std::vector<double>>();
    const auto r = ttest_independent(a, b, 0, 1);
    CHECK(std::abs(r.statistic - c["t"].get<double>()) < 1e-6);
    CHECK(std::abs(r.p - c["p"].get<double>()) < 1e-6);
    CHECK(r.df1 == c["df"].get<double>());
    CHECK(std::abs(*r.cohens_d - c["d"].get<double>()) < 1e-9);
  }

  const std::vector<double> x{1, 2, 3, 4};
  const auto zero = ttest_independent(x, x, 0, 1);
  CHECK(zero.statistic == 0.0);
  CHECK(*zero.cohens_d == 0.0);

  const auto sw = t::moment_matched(5.13, 1.56, 30, 17);
  const auto ctl = t::moment_matched(4.73, 1.66, 30, 18);
  const auto r = ttest_independent(sw, ctl, 2000, 42);
  CHECK(std::abs(r.statistic - 0.96) <= 0.01);
  CHECK(std::abs(*r.cohens_d - 0.25) <= 0.005);
  CHECK(r.df1 == 58);
  REQUIRE(r.ci_low.has_value());
  CHECK(*r.ci_low < 0.40);
  CHECK(*r.ci_high > 0.40);
  const auto again = ttest_independent(sw, ctl, 2000, 42);
  CHECK(*again.ci_low == *r.ci_low);
  CHECK(*again.ci_high == *r.ci_high);

  CHECK(error_code([] { ttest_independent(std::vector<double>{1}, std::vector<double>{1, 2}, 0, 1); }) ==
        Errc::DegenerateGroups);
  CHECK(error_code([&] { ttest_independent(x, x, 10, 1, 1.5); }) == Errc::InvalidArgument);
}
