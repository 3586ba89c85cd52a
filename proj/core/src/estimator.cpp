#include "phimi/estimator.hpp"

#include "phimi/error.hpp"
#include "phimi/summation.hpp"

namespace phimi {

DualEstimate estimate(const ObjectiveContext& ctx, const OptimOptions& options) {
  const ObjectiveFn fn = [&ctx](const ParamVector& theta) {
    ObjectiveValue v = ctx.evaluate(theta, true);
    return Evaluation{v.value, std::move(v.gradient), v.feasible};
  };
  const OptimResult r =
      maximize_multistart(fn, ctx.model().bounds(), ctx.start_point(), options);
  DualEstimate est;
  est.theta_hat = r.x;
  est.i_hat = r.value;
  est.objective_evals = r.evaluations;
  est.iterations = r.iterations;
  est.converged = r.converged;
  est.grad_norm = r.grad_norm;
  return est;
}

double plugin_estimate(const Divergence& divergence, const PairedSample& sample,
                       const Levels& levels) {
  if (sample.is_real()) throw SupportError("plug-in estimate needs categorical data");
  const std::size_t k1 = levels.k1(), k2 = levels.k2();
  std::vector<double> counts(k1 * k2, 0.0), row(k1, 0.0), col(k2, 0.0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const std::size_t a = levels.x_code(sample.x_tokens()[i]);
    const std::size_t b = levels.y_code(sample.y_tokens()[i]);
    counts[a * k2 + b] += 1.0;
    row[a] += 1.0;
    col[b] += 1.0;
  }
  const double n = static_cast<double>(sample.size());
  CompensatedSum sum;
  for (std::size_t a = 0; a < k1; ++a) {
    for (std::size_t b = 0; b < k2; ++b) {
      const double prod = (row[a] / n) * (col[b] / n);
      if (prod == 0.0) continue;
      sum.add(prod * divergence.phi((counts[a * k2 + b] / n) / prod));
    }
  }
  return sum.value();
}

}  // namespace phimi
