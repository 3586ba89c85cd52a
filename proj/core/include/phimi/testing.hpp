#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "phimi/asymptotics.hpp"
#include "phimi/objective.hpp"
#include "phimi/optimizer.hpp"
#include "phimi/test_result.hpp"

namespace phimi {

struct BootstrapConfig {
  std::size_t b_reps = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  /// Worker count; 0 defers to PHIMI_THREADS or the hardware.
  std::size_t threads = 0;
  /// Largest tolerated fraction of non-converged replicates.
  double max_failure_rate = 0.05;
};

struct BootstrapResult {
  /// 2 n I_hat of the converged replicates, in replicate order.
  std::vector<double> statistics;
  std::size_t failures = 0;
  double critical_value = 0.0;
};

/// Replicates of S_n under the product of the empirical margins: for each of
/// the b_reps replicates, n x-indices and n y-indices are drawn with
/// replacement from separate random streams. Rank-based models recompute
/// their ranks on every replicate. Throws OptimFailure when more than
/// max_failure_rate of the replicates fail to converge; ConfigError when
/// b_reps < 100.
BootstrapResult bootstrap_null(const ObjectiveContext& ctx, const BootstrapConfig& cfg,
                               const OptimOptions& options = {});

/// (1 - alpha) quantile of bootstrap_null's replicates.
double bootstrap_critical(const ObjectiveContext& ctx, const BootstrapConfig& cfg);

struct Calibration {
  double alpha = 0.05;
  std::uint64_t seed = 0;
  /// Z^T Z draws for the ZtZ quantile.
  std::size_t ztz_draws = 10000;
  /// Product draws for moments when a margin is continuous.
  std::size_t moment_draws = 1'000'000;
  /// ZtZ: covariances known in advance; otherwise taken from the empirical
  /// margins of the sample.
  std::optional<AsymptoticCovariances> covariances;
  /// Precomputed critical value; skips calibration entirely.
  std::optional<double> critical_value;
  std::size_t b_reps = 1000;
  std::size_t threads = 0;
};

/// Throws RouteMismatch unless the route fits the model and divergence:
/// ChiSqExact needs a finite-discrete model, ZtZ an exponential model with
/// the KL divergence; Bootstrap fits every model.
void check_route(const ObjectiveContext& ctx, Route route);

/// Critical value b_alpha for the sample held by ctx.
double critical_value(const ObjectiveContext& ctx, Route route, const Calibration& cal);

/// S_n = 2 n I_hat compared with b_alpha; reject iff S_n > b_alpha. The
/// chi-square route reports the asymptotic p-value, the bootstrap route
/// (1 + #{S* >= S_n}) / (B + 1), the ZtZ route none.
TestResult test_independence(const ObjectiveContext& ctx, Route route,
                             const Calibration& cal);

}  // namespace phimi
