#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "phimi/ratio_model.hpp"
#include "phimi/rng.hpp"
#include "phimi/sample.hpp"

namespace phimi {

/// Marginal law used to evaluate population moments under independence.
/// Discrete margins are enumerated exactly; continuous ones are sampled.
class Margin {
 public:
  static Margin normal(double mean = 0.0, double sd = 1.0);
  static Margin uniform(double lo = 0.0, double hi = 1.0);
  /// Finite support with the given probabilities (normalized here).
  static Margin discrete(std::vector<double> values, std::vector<double> probs);
  /// Empirical law of observed values, repeated values merged.
  static Margin empirical(std::span<const double> values);

  bool is_discrete() const noexcept { return kind_ == Kind::Discrete; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  double draw(Rng& rng) const;

 private:
  enum class Kind { Normal, Uniform, Discrete };
  Margin() = default;

  Kind kind_ = Kind::Normal;
  double p1_ = 0.0;
  double p2_ = 1.0;
  std::vector<double> values_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

/// Empirical margins of a sample in the coordinates the model reads: the
/// observed values for real data, the level codes weighted by their
/// frequencies for a finite-discrete model.
std::pair<Margin, Margin> sample_margins(const RatioModel& model, const PairedSample& sample);

/// E[W W^T] with W = (1, xi_1(X) zeta_1(Y), ..., xi_d(X) zeta_d(Y)) and X, Y
/// independent. Exact when both margins are discrete, otherwise a mean over
/// m independent product draws. Throws SingularityError when the condition
/// number exceeds 1e12 and RouteMismatch for the copula family.
Eigen::MatrixXd sigma1_under_h0(const RatioModel& model, const Margin& mx, const Margin& my,
                                std::size_t m = 1'000'000, std::uint64_t seed = 0);

/// Delta-method covariance J Cov(V) J^T of the limit of sqrt(n) M_n'(0), with
/// V = (1, xi_k(X), zeta_k(Y), xi_k(X) zeta_k(Y)); padded with a zero first
/// row and column.
Eigen::MatrixXd sigma2_under_h0(const RatioModel& model, const Margin& mx, const Margin& my,
                                std::size_t m = 1'000'000, std::uint64_t seed = 0);

struct AsymptoticCovariances {
  Eigen::MatrixXd sigma1;
  Eigen::MatrixXd sigma2;
  /// sigma1^{-1/2} sigma2 sigma1^{-1/2}
  Eigen::MatrixXd c_matrix;

  /// Both covariances from one pass over the same product draws.
  static AsymptoticCovariances compute(const RatioModel& model, const Margin& mx,
                                       const Margin& my, std::size_t m = 1'000'000,
                                       std::uint64_t seed = 0);
  static AsymptoticCovariances from_matrices(Eigen::MatrixXd sigma1, Eigen::MatrixXd sigma2);
};

/// n_draws realizations of Z^T Z with Z ~ N(0, C), C = cov.c_matrix; negative
/// round-off eigenvalues of C are set to zero.
std::vector<double> sample_ztz(const AsymptoticCovariances& cov, std::size_t n_draws,
                               std::uint64_t seed);

/// Upper alpha quantile of Z^T Z from n_draws draws (see empirical_quantile).
double limit_quantile_ztz(const AsymptoticCovariances& cov, double alpha,
                          std::size_t n_draws = 10000, std::uint64_t seed = 0);

/// Degrees of freedom (k1 - 1)(k2 - 1) of the finite-discrete chi-square limit.
std::size_t chisq_df_finite(std::size_t k1, std::size_t k2);

}  // namespace phimi
