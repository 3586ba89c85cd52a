#include "phimi/optimizer.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "phimi/error.hpp"
#include "phimi/rng.hpp"

namespace phimi {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktrack = 60;
constexpr std::uint64_t kRestartSeed = 0x6d756c7469737461ULL;

bool usable(const Evaluation& e) {
  return e.feasible && std::isfinite(e.value) && e.gradient.allFinite();
}

// Free coordinates: not pinned at a bound by a gradient pushing outward.
Eigen::Array<bool, Eigen::Dynamic, 1> free_set(const ParamVector& x, const ParamVector& g,
                                              const Box& box) {
  Eigen::Array<bool, Eigen::Dynamic, 1> free(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const bool at_lo = x[k] <= box.lower[k] && g[k] < 0.0;
    const bool at_hi = x[k] >= box.upper[k] && g[k] > 0.0;
    free[k] = !(at_lo || at_hi);
  }
  return free;
}

}  // namespace

double projected_grad_norm(const ParamVector& x, const ParamVector& grad, const Box& box) {
  double norm = 0.0;
  const auto free = free_set(x, grad, box);
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (free[k]) norm = std::max(norm, std::abs(grad[k]));
  }
  return norm;
}

OptimResult maximize_box(const ObjectiveFn& fn, const Box& box, const ParamVector& x0,
                         const OptimOptions& options) {
  const Eigen::Index dim = x0.size();
  OptimResult res;
  res.x = box.clamp(x0);
  Evaluation cur = fn(res.x);
  res.evaluations = 1;
  if (!usable(cur)) throw OptimFailure("starting point is infeasible");

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(dim, dim);
  bool scaled = false;

  while (true) {
    res.grad_norm = projected_grad_norm(res.x, cur.gradient, box);
    if (res.grad_norm <= options.grad_tol) {
      res.converged = true;
      break;
    }
    if (res.iterations >= options.max_iter) break;
    ++res.iterations;

    const auto free = free_set(res.x, cur.gradient, box);
    ParamVector gf = cur.gradient;
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (!free[k]) gf[k] = 0.0;
    }

    // Ascent direction on the free subspace.
    auto direction = [&](const Eigen::MatrixXd& h) {
      ParamVector d = h * gf;
      for (Eigen::Index k = 0; k < dim; ++k) {
        if (!free[k]) d[k] = 0.0;
      }
      return d;
    };
    ParamVector dir = direction(hinv);
    if (!(dir.dot(gf) > 0.0)) {
      hinv.setIdentity();
      scaled = false;
      dir = gf;
    }

    double step = 1.0;
    if (!scaled) step = std::min(1.0, 1.0 / gf.lpNorm<Eigen::Infinity>());

    bool accepted = false;
    ParamVector x_new;
    Evaluation next;
    for (int bt = 0; bt < kMaxBacktrack; ++bt, step *= 0.5) {
      x_new = box.clamp(res.x + step * dir);
      if ((x_new - res.x).lpNorm<Eigen::Infinity>() == 0.0) break;
      next = fn(x_new);
      ++res.evaluations;
      if (!usable(next)) continue;
      if (next.value >= cur.value + kArmijo * cur.gradient.dot(x_new - res.x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!hinv.isIdentity()) {
        hinv.setIdentity();
        scaled = false;
        continue;
      }
      break;
    }

    const ParamVector s = x_new - res.x;
    // Curvature pair for the minimization of -fn.
    const ParamVector y = cur.gradient - next.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        hinv = Eigen::MatrixXd::Identity(dim, dim) * (sy / y.squaredNorm());
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      hinv = (eye - rho * s * y.transpose()) * hinv * (eye - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    res.x = x_new;
    cur = std::move(next);
  }
  res.value = cur.value;
  return res;
}

OptimResult maximize_multistart(const ObjectiveFn& fn, const Box& box,
                                const ParamVector& x0, const OptimOptions& options) {
  OptimResult best = maximize_box(fn, box, x0, options);
  if (best.converged) return best;

  std::size_t iterations = best.iterations;
  std::size_t evaluations = best.evaluations;
  Rng rng(kRestartSeed);
  for (std::size_t r = 0; r < options.restarts; ++r) {
    // Points spread in a unit neighbourhood of x0, pulled inside the box.
    ParamVector start(x0.size());
    for (Eigen::Index k = 0; k < x0.size(); ++k) {
      const double lo = std::max(box.lower[k], x0[k] - 1.0);
      const double hi = std::min(box.upper[k], x0[k] + 1.0);
      start[k] = lo + (hi - lo) * rng.uniform();
    }
    OptimResult run;
    try {
      run = maximize_box(fn, box, start, options);
    } catch (const OptimFailure&) {
      continue;
    }
    iterations += run.iterations;
    evaluations += run.evaluations;
    const bool better = (run.converged && !best.converged) ||
                        (run.converged == best.converged && run.value > best.value);
    if (better) best = std::move(run);
  }
  best.iterations = iterations;
  best.evaluations = evaluations;
  return best;
}

}  // namespace phimi
