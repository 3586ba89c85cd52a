#pragma once

#include <cstddef>

#include "phimi/divergence.hpp"
#include "phimi/objective.hpp"
#include "phimi/optimizer.hpp"
#include "phimi/sample.hpp"

namespace phimi {

/// Maximizer of the dual objective and its value.
struct DualEstimate {
  ParamVector theta_hat;
  /// Estimated phi-mutual information, M_n(theta_hat).
  double i_hat = 0.0;
  std::size_t objective_evals = 0;
  std::size_t iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
};

/// Maximizes M_n over the model's box, starting from ctx.start_point(). A
/// non-converged run is returned with converged == false, not thrown.
DualEstimate estimate(const ObjectiveContext& ctx, const OptimOptions& options = {});

/// Direct plug-in phi-MI of a categorical sample:
///   sum over cells of p_x p_y phi(p_xy / (p_x p_y)).
/// Cells with p_x p_y = 0 contribute nothing. Throws DomainError when an
/// empty cell meets a divergence with phi(0) = +inf (gamma <= 0).
double plugin_estimate(const Divergence& divergence, const PairedSample& sample,
                       const Levels& levels);

}  // namespace phimi
