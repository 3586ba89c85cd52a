#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phimi/divergence.hpp"
#include "phimi/ratio_model.hpp"
#include "phimi/sample.hpp"

namespace phimi {

struct ObjectiveValue {
  double value = 0.0;
  ParamVector gradient;
  /// False when some phi'(h) left the conjugate domain or the sums overflowed.
  bool feasible = true;
};

/// Empirical dual objective
///
///   M_n(theta) = (1/n) sum_i f(x_i, y_i) - (1/n^2) sum_i sum_j g(x_i, y_j)
///
/// with f = phi'(h_theta) and g = phi*(phi'(h_theta)). The double sum runs
/// over all n^2 pairs, diagonal included.
///
/// Per-sample data is precomputed at construction: basis factor arrays for
/// the exponential-bilinear family, the contingency table for the
/// finite-discrete family, rescaled ranks for the copula family. The context
/// is immutable and evaluations are thread-safe.
class ObjectiveContext {
 public:
  /// Throws SupportError when the sample kind does not fit the model (real
  /// data with a finite-discrete model, categories with a real model, or
  /// labels outside the model's levels).
  ObjectiveContext(Divergence divergence, RatioModel model, PairedSample sample);

  const Divergence& divergence() const noexcept { return divergence_; }
  const RatioModel& model() const noexcept { return model_; }
  const PairedSample& sample() const noexcept { return sample_; }
  std::size_t size() const noexcept { return sample_.size(); }

  /// Same divergence and model on another sample.
  ObjectiveContext with_sample(PairedSample sample) const;
  /// Same divergence and model on the pairs selected by `index`.
  ObjectiveContext subset(std::span<const std::size_t> index) const;

  /// Never throws for in-box theta; infeasibility is reported in the flag.
  ObjectiveValue evaluate(const ParamVector& theta, bool with_gradient = true) const;

  /// M_n(theta). Throws BoundsError outside the box and ConjugateDomainError
  /// at infeasible theta.
  double objective(const ParamVector& theta) const;
  ParamVector gradient(const ParamVector& theta) const;

  /// Finite-discrete family: observed counts N_ab (row-major, K1 x K2).
  const std::vector<double>& counts() const noexcept { return counts_; }
  /// Copula family: rescaled ranks of the sample.
  const EmpiricalMargins& margins() const noexcept { return margins_; }

  /// Starting point of the optimizer. theta_0 for every family except the
  /// finite-discrete one, where the saturated maximizer (log of the observed
  /// cell ratios, clamped to the box) is available in closed form.
  ParamVector start_point() const;

 private:
  ObjectiveValue eval_bilinear(const ParamVector& theta, bool with_gradient) const;
  ObjectiveValue eval_finite(const ParamVector& theta, bool with_gradient) const;
  ObjectiveValue eval_copula(const ParamVector& theta, bool with_gradient) const;
  void check(const ParamVector& theta) const;

  Divergence divergence_;
  RatioModel model_;
  PairedSample sample_;

  // ExpBilinear: factor arrays in row-major n x d layout.
  std::vector<double> xi_;
  std::vector<double> zeta_;
  // FiniteDiscrete: counts and margins of the contingency table.
  std::vector<double> counts_;
  std::vector<double> row_;
  std::vector<double> col_;
  // CopulaFGM: a_i = 1 - 2u_i and b_j = 1 - 2v_j.
  EmpiricalMargins margins_;
  std::vector<double> a_;
  std::vector<double> b_;
};

}  // namespace phimi
