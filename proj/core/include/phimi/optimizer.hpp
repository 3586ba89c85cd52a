#pragma once

#include <cstddef>
#include <functional>

#include "phimi/ratio_model.hpp"

namespace phimi {

struct OptimOptions {
  /// Convergence when the projected gradient has infinity norm below this.
  double grad_tol = 1e-6;
  std::size_t max_iter = 500;
  /// Extra starts tried when the first run does not converge.
  std::size_t restarts = 5;
};

struct OptimResult {
  ParamVector x;
  double value = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Value and gradient of the function being maximized. A non-finite value or
/// feasible == false marks an infeasible point.
struct Evaluation {
  double value;
  ParamVector gradient;
  bool feasible;
};
using ObjectiveFn = std::function<Evaluation(const ParamVector&)>;

/// Infinity norm of the gradient after zeroing components that point out of
/// the box at active bounds.
double projected_grad_norm(const ParamVector& x, const ParamVector& grad, const Box& box);

/// Maximizes fn over the box by projected BFGS with Armijo backtracking along
/// the projection arc. Infeasible trial points are treated as -infinity and
/// shrink the step. x0 must be feasible.
OptimResult maximize_box(const ObjectiveFn& fn, const Box& box, const ParamVector& x0,
                         const OptimOptions& options = {});

/// maximize_box from x0; if that fails to converge, from options.restarts
/// further deterministic starting points as well, keeping the best result
/// (converged runs first, then the largest value).
OptimResult maximize_multistart(const ObjectiveFn& fn, const Box& box,
                                const ParamVector& x0, const OptimOptions& options = {});

}  // namespace phimi
