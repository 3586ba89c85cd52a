#include "phimi/testing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phimi/distributions.hpp"
#include "phimi/error.hpp"
#include "phimi/estimator.hpp"
#include "phimi/parallel.hpp"

namespace phimi {

namespace {

enum : std::uint64_t { kBootX = 11, kBootY = 12, kZtz = 13, kMoments = 14 };

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("test level", alpha, "(0, 1)");
}

}  // namespace

std::string_view route_name(Route route) {
  switch (route) {
    case Route::ZtZ: return "ztz";
    case Route::ChiSqExact: return "chisq";
    case Route::Bootstrap: return "bootstrap";
    case Route::StudentT: return "student-t";
    case Route::Normal: return "normal";
  }
  return "?";
}

Route parse_route(std::string_view name) {
  if (name == "ztz") return Route::ZtZ;
  if (name == "chisq") return Route::ChiSqExact;
  if (name == "bootstrap") return Route::Bootstrap;
  throw ConfigError("unknown calibration route '" + std::string(name) +
                    "' (expected ztz, chisq or bootstrap)");
}

BootstrapResult bootstrap_null(const ObjectiveContext& ctx, const BootstrapConfig& cfg,
                               const OptimOptions& options) {
  check_alpha(cfg.alpha);
  if (cfg.b_reps < 100) throw ConfigError("bootstrap needs at least 100 replicates");
  const std::size_t n = ctx.size();
  const double two_n = 2.0 * static_cast<double>(n);
  const std::uint64_t seed_x = derive_seed(cfg.seed, kBootX);
  const std::uint64_t seed_y = derive_seed(cfg.seed, kBootY);

  std::vector<double> stats(cfg.b_reps, 0.0);
  std::vector<char> ok(cfg.b_reps, 0);
  parallel_for(cfg.b_reps, cfg.threads, [&](std::size_t r) {
    Rng rx = Rng::stream(seed_x, r);
    Rng ry = Rng::stream(seed_y, r);
    std::vector<std::size_t> xi(n), yi(n);
    for (auto& i : xi) i = rx.index(n);
    for (auto& i : yi) i = ry.index(n);
    const DualEstimate est = estimate(ctx.with_sample(ctx.sample().remix(xi, yi)), options);
    stats[r] = two_n * est.i_hat;
    ok[r] = est.converged ? 1 : 0;
  });

  BootstrapResult res;
  for (std::size_t r = 0; r < cfg.b_reps; ++r) {
    if (ok[r]) res.statistics.push_back(stats[r]); else ++res.failures;
  }
  if (static_cast<double>(res.failures) >
      cfg.max_failure_rate * static_cast<double>(cfg.b_reps)) {
    throw OptimFailure(std::to_string(res.failures) + " of " + std::to_string(cfg.b_reps) +
                       " bootstrap replicates did not converge");
  }
  res.critical_value = empirical_quantile(res.statistics, 1.0 - cfg.alpha);
  return res;
}

double bootstrap_critical(const ObjectiveContext& ctx, const BootstrapConfig& cfg) {
  return bootstrap_null(ctx, cfg).critical_value;
}

void check_route(const ObjectiveContext& ctx, Route route) {
  switch (route) {
    case Route::ChiSqExact:
      if (ctx.model().family() != Family::FiniteDiscrete) {
        throw RouteMismatch("the chi-square route needs a finite-discrete model");
      }
      return;
    case Route::ZtZ:
      if (!ctx.model().is_exponential() || ctx.divergence().kind() != DivergenceKind::KL) {
        throw RouteMismatch("the ZtZ route needs an exponential model and the KL divergence");
      }
      return;
    case Route::Bootstrap:
      return;
    case Route::StudentT:
    case Route::Normal:
      break;
  }
  throw RouteMismatch("route '" + std::string(route_name(route)) +
                      "' does not calibrate divergence tests");
}

double critical_value(const ObjectiveContext& ctx, Route route, const Calibration& cal) {
  check_route(ctx, route);
  check_alpha(cal.alpha);
  if (cal.critical_value) return *cal.critical_value;
  switch (route) {
    case Route::ChiSqExact: {
      const Levels& lv = ctx.model().levels();
      return chisq_quantile(1.0 - cal.alpha,
                            static_cast<double>(chisq_df_finite(lv.k1(), lv.k2())));
    }
    case Route::ZtZ: {
      AsymptoticCovariances cov;
      if (cal.covariances) {
        cov = *cal.covariances;
      } else {
        const auto [mx, my] = sample_margins(ctx.model(), ctx.sample());
        cov = AsymptoticCovariances::compute(ctx.model(), mx, my, cal.moment_draws,
                                             derive_seed(cal.seed, kMoments));
      }
      return limit_quantile_ztz(cov, cal.alpha, cal.ztz_draws, derive_seed(cal.seed, kZtz));
    }
    case Route::Bootstrap: {
      BootstrapConfig bc{cal.b_reps, cal.alpha, cal.seed, cal.threads};
      return bootstrap_critical(ctx, bc);
    }
    default:
      break;
  }
  throw RouteMismatch("unsupported route");
}

TestResult test_independence(const ObjectiveContext& ctx, Route route,
                             const Calibration& cal) {
  check_route(ctx, route);
  check_alpha(cal.alpha);
  const DualEstimate est = estimate(ctx);

  TestResult res;
  res.route = route;
  res.alpha = cal.alpha;
  res.n = ctx.size();
  res.i_hat = est.i_hat;
  res.converged = est.converged;
  res.statistic = 2.0 * static_cast<double>(ctx.size()) * est.i_hat;

  if (route == Route::Bootstrap && !cal.critical_value) {
    BootstrapConfig bc{cal.b_reps, cal.alpha, cal.seed, cal.threads};
    const BootstrapResult boot = bootstrap_null(ctx, bc);
    res.critical_value = boot.critical_value;
    const auto exceed = std::count_if(boot.statistics.begin(), boot.statistics.end(),
                                      [&](double s) { return s >= res.statistic; });
    res.p_value = (1.0 + static_cast<double>(exceed)) /
                  (static_cast<double>(boot.statistics.size()) + 1.0);
  } else {
    res.critical_value = critical_value(ctx, route, cal);
    if (route == Route::ChiSqExact) {
      const Levels& lv = ctx.model().levels();
      res.p_value = chisq_sf(std::max(res.statistic, 0.0),
                             static_cast<double>(chisq_df_finite(lv.k1(), lv.k2())));
    }
  }
  res.reject = res.statistic > res.critical_value;
  return res;
}

}  // namespace phimi
