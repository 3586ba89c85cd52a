#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "phimi/distributions.hpp"
#include "phimi/error.hpp"
#include "phimi/samplers.hpp"
#include "phimi/testing.hpp"

namespace phimi {
namespace {

ObjectiveContext finite_ctx(const PairedSample& s, std::size_t k, Divergence d = Divergence::kl()) {
  return ObjectiveContext(d, RatioModel::finite_discrete(Levels::numbered(k, k)), s);
}

PairedSample copy_pairs(std::size_t n) {
  std::vector<std::string> x;
  for (std::size_t i = 0; i < n; ++i) x.push_back(i % 2 ? "1" : "2");
  return PairedSample::categorical(x, x);
}

TEST(Routes, ParseAndCheck) {
  EXPECT_EQ(parse_route("ztz"), Route::ZtZ);
  EXPECT_EQ(parse_route("bootstrap"), Route::Bootstrap);
  EXPECT_THROW(parse_route("exact"), ConfigError);
  EXPECT_EQ(route_name(Route::ChiSqExact), "chisq");

  const ObjectiveContext g(Divergence::kl(), gaussian_model(), sample_gaussian({0}, 30, 1));
  EXPECT_THROW(check_route(g, Route::ChiSqExact), RouteMismatch);
  EXPECT_NO_THROW(check_route(g, Route::ZtZ));
  EXPECT_NO_THROW(check_route(g, Route::Bootstrap));
  const ObjectiveContext h(Divergence::hellinger(), gaussian_model(), sample_gaussian({0}, 30, 1));
  EXPECT_THROW(check_route(h, Route::ZtZ), RouteMismatch);
  const ObjectiveContext c(Divergence::kl(), RatioModel::copula_fgm(), sample_fgm({0}, 30, 1));
  EXPECT_THROW(check_route(c, Route::ZtZ), RouteMismatch);
  EXPECT_THROW(check_route(c, Route::StudentT), RouteMismatch);
}

TEST(ChiSquareRoute, CriticalValueAndPerfectDependence) {
  Calibration cal;
  cal.alpha = 0.01;
  const ObjectiveContext ctx = finite_ctx(copy_pairs(100), 2);
  EXPECT_NEAR(critical_value(ctx, Route::ChiSqExact, cal), 6.634896601021214, 1e-9);
  const TestResult r = test_independence(ctx, Route::ChiSqExact, cal);
  EXPECT_TRUE(r.reject);
  // the box clamps the empty cells at -10, a hair below 2 n log 2
  EXPECT_NEAR(r.statistic, 200 * std::log(2.0), 0.05);
  EXPECT_LT(*r.p_value, 1e-20);
  EXPECT_EQ(r.n, 100u);
}

TEST(ChiSquareRoute, PValueConsistentWithDecision) {
  Calibration cal;
  cal.alpha = 0.05;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const TestResult r = test_independence(finite_ctx(sample_finite({3, 0.15}, 60, seed), 3),
                                           Route::ChiSqExact, cal);
    EXPECT_EQ(r.reject, r.statistic > r.critical_value);
    EXPECT_EQ(r.reject, *r.p_value < cal.alpha);
    EXPECT_GE(*r.p_value, 0.0);
    EXPECT_LE(*r.p_value, 1.0);
  }
}

TEST(Bootstrap, QuantileIsOrderStatistic) {
  BootstrapConfig cfg;
  cfg.b_reps = 1000;
  cfg.seed = 3;
  const BootstrapResult res = bootstrap_null(
      ObjectiveContext(Divergence::kl(), RatioModel::copula_fgm(), sample_fgm({0.3}, 40, 3)), cfg);
  ASSERT_EQ(res.statistics.size() + res.failures, 1000u);
  ASSERT_EQ(res.failures, 0u);
  std::vector<double> sorted = res.statistics;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_DOUBLE_EQ(res.critical_value, sorted[949]);
}

TEST(Bootstrap, DeterministicAndThreadIndependent) {
  const ObjectiveContext ctx(Divergence::kl(), gaussian_model(), sample_gaussian({0.2}, 40, 4));
  BootstrapConfig a;
  a.b_reps = 150;
  a.seed = 9;
  a.threads = 1;
  BootstrapConfig b = a;
  b.threads = 4;
  EXPECT_EQ(bootstrap_null(ctx, a).statistics, bootstrap_null(ctx, b).statistics);
  BootstrapConfig c = a;
  c.seed = 10;
  EXPECT_NE(bootstrap_null(ctx, a).statistics, bootstrap_null(ctx, c).statistics);
}

TEST(Bootstrap, ResamplesMarginsIndependently) {
  // With y a copy of x, every replicate that kept the pairing would give
  // the perfect-dependence statistic 2 n log 2.
  const PairedSample s = copy_pairs(60);
  BootstrapConfig cfg;
  cfg.b_reps = 200;
  cfg.seed = 5;
  const BootstrapResult res = bootstrap_null(finite_ctx(s, 2), cfg);
  const double perfect = 120 * std::log(2.0);
  EXPECT_LT(*std::max_element(res.statistics.begin(), res.statistics.end()), perfect / 4);
}

TEST(Bootstrap, AgreesWithChiSquareLimit) {
  BootstrapConfig cfg;
  cfg.b_reps = 2000;
  cfg.alpha = 0.01;
  cfg.seed = 6;
  const double b = bootstrap_critical(finite_ctx(sample_finite({2, 0.0}, 200, 6), 2), cfg);
  EXPECT_NEAR(b, 6.635, 1.0);
}

TEST(Bootstrap, PValueAndErrors) {
  Calibration cal;
  cal.b_reps = 200;
  cal.seed = 7;
  const ObjectiveContext ctx(Divergence::kl(), RatioModel::copula_fgm(), sample_fgm({1.0}, 80, 7));
  const TestResult r = test_independence(ctx, Route::Bootstrap, cal);
  ASSERT_TRUE(r.p_value.has_value());
  EXPECT_GT(*r.p_value, 0.0);
  EXPECT_LE(*r.p_value, 1.0);
  EXPECT_EQ(r.reject, r.statistic > r.critical_value);
  if (r.reject) EXPECT_LE(*r.p_value, cal.alpha + 1.0 / 201);

  BootstrapConfig small;
  small.b_reps = 99;
  EXPECT_THROW(bootstrap_null(ctx, small), ConfigError);
}

TEST(ZtzRoute, GaussianCalibration) {
  Calibration cal;
  cal.seed = 8;
  cal.moment_draws = 200000;
  const ObjectiveContext ctx(Divergence::kl(), gaussian_model(), sample_gaussian({0.6}, 200, 8));
  const TestResult r = test_independence(ctx, Route::ZtZ, cal);
  EXPECT_TRUE(r.reject);
  EXPECT_FALSE(r.p_value.has_value());
  // only the x*y term has a non-degenerate score: the limit is chi-square(1)
  EXPECT_NEAR(r.critical_value, chisq_quantile(0.95, 1), 0.3);
  EXPECT_EQ(r.critical_value, critical_value(ctx, Route::ZtZ, cal));
  cal.critical_value = 1e9;
  EXPECT_FALSE(test_independence(ctx, Route::ZtZ, cal).reject);
}

TEST(ZtzRoute, FiniteModelMatchesChiSquare) {
  Calibration cal;
  cal.alpha = 0.05;
  cal.ztz_draws = 100000;
  cal.seed = 9;
  const ObjectiveContext ctx = finite_ctx(sample_finite({3, 0.0}, 300, 9), 3);
  EXPECT_NEAR(critical_value(ctx, Route::ZtZ, cal), chisq_quantile(0.95, 4), 0.2);
}

TEST(Testing, LevelUnderNullForChiSquareRoute) {
  Calibration cal;
  cal.alpha = 0.05;
  int rejections = 0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    rejections += test_independence(finite_ctx(sample_finite({2, 0.0}, 200, stream_seed(10, r)), 2),
                                    Route::ChiSqExact, cal).reject;
  }
  EXPECT_NEAR(rejections / double(reps), 0.05, 3 * std::sqrt(0.05 * 0.95 / reps));
}

}  // namespace
}  // namespace phimi
