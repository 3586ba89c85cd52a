#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phimi/sample.hpp"

namespace phimi {

/// Model parameter theta. For models with an intercept, entry 0 is the
/// normalizing coefficient alpha and entries 1..d are beta; the copula model
/// has no intercept and theta is beta alone.
using ParamVector = Eigen::VectorXd;

struct Range {
  double lo;
  double hi;
};

/// Per-coordinate box realizing the compact parameter space.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  std::size_t size() const noexcept { return static_cast<std::size_t>(lower.size()); }
  bool contains(const ParamVector& theta) const;
  ParamVector clamp(const ParamVector& theta) const;
};

/// Named univariate function from the basis registry.
struct UnivariateBasis {
  std::string name;
  double (*fn)(double) = nullptr;

  bool is_constant() const noexcept { return name == "1"; }
  double operator()(double v) const { return fn(v); }
};

/// Registry lookup: "1", "x"/"y" (identity), "x2"/"y2" (square).
/// Throws ConfigError for unknown names.
UnivariateBasis basis_function(std::string_view name);

/// One product term xi(x) * zeta(y) of an exponential-bilinear model.
struct BasisPair {
  UnivariateBasis xi;
  UnivariateBasis zeta;

  std::string name() const { return xi.name + "," + zeta.name; }
};

enum class Family { ExpBilinear, FiniteDiscrete, CopulaFGM };

std::string_view family_name(Family family);

/// Parametric family h_theta for the density ratio dP / dP_perp.
///
///   ExpBilinear     h = exp(alpha + sum_k beta_k xi_k(x) zeta_k(y))
///   FiniteDiscrete  h = exp(alpha + beta_{ij}) at (a_i, b_j), beta_{11} := 0
///   CopulaFGM       h = 1 + theta (1 - 2u)(1 - 2v) on margin-transformed (u, v)
///
/// Immutable after construction.
class RatioModel {
 public:
  static constexpr Range kDefaultRange{-10.0, 10.0};
  static constexpr Range kDefaultFgmRange{-0.999, 0.999};

  static RatioModel exp_bilinear(std::vector<BasisPair> basis,
                                 Range alpha = kDefaultRange,
                                 Range beta = kDefaultRange);
  static RatioModel finite_discrete(Levels levels, Range alpha = kDefaultRange,
                                    Range beta = kDefaultRange);
  static RatioModel copula_fgm(Range theta = kDefaultFgmRange);

  Family family() const noexcept { return family_; }
  bool is_exponential() const noexcept { return family_ != Family::CopulaFGM; }
  bool has_intercept() const noexcept { return is_exponential(); }
  /// Total parameter dimension (1 + d for exponential families, 1 for FGM).
  std::size_t dimension() const noexcept { return bounds_.size(); }
  /// Number of product terms d of an exponential family.
  std::size_t terms() const noexcept;

  const Box& bounds() const noexcept { return bounds_; }
  const std::vector<BasisPair>& basis() const noexcept { return basis_; }
  const Levels& levels() const noexcept { return levels_; }

  /// theta_0, the independence parameter (all zeros).
  ParamVector null_parameter() const { return ParamVector::Zero(bounds_.lower.size()); }

  /// Copy with new boxes; for the copula model only `beta` is used.
  RatioModel with_bounds(Range alpha, Range beta) const;

  /// Short textual form, e.g. "expbilinear:x2,1;1,y2;x,y", "finite", "fgm".
  std::string descriptor() const;

  // Factor values of the product terms of an exponential family. For the
  // finite-discrete family x and y are level codes and the factors are the
  // indicator functions of the K1*K2 - 1 free cells.
  void xi_values(double x, std::span<double> out) const;
  void zeta_values(double y, std::span<double> out) const;

  /// beta index (0-based, excluding alpha) of finite-discrete cell (i, j);
  /// npos for the reference cell (0, 0).
  std::size_t cell_index(std::size_t i, std::size_t j) const noexcept;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  RatioModel() = default;

  Family family_ = Family::ExpBilinear;
  std::vector<BasisPair> basis_;
  Levels levels_;
  Box bounds_;
};

/// h_theta(x, y) for real-valued families (ExpBilinear, or CopulaFGM with
/// (x, y) = (u, v) in [0, 1]^2). Throws BoundsError / SupportError.
double h_eval(const RatioModel& model, const ParamVector& theta, double x, double y);
/// h_theta(x, y) for the finite-discrete family.
double h_eval(const RatioModel& model, const ParamVector& theta, const std::string& x,
              const std::string& y);

/// Gradient of h_theta with respect to theta.
ParamVector h_grad(const RatioModel& model, const ParamVector& theta, double x, double y);
ParamVector h_grad(const RatioModel& model, const ParamVector& theta,
                   const std::string& x, const std::string& y);

/// ExpBilinear model with basis {(x^2, 1), (1, y^2), (x, y)}, the
/// unconstrained superset of the bivariate-normal ratio.
RatioModel gaussian_model(Range alpha = RatioModel::kDefaultRange,
                          Range beta = RatioModel::kDefaultRange);

/// True parameter of gaussian_model() for a centered normal pair with
/// correlation rho and common marginal standard deviation sigma.
ParamVector gaussian_parameter(double rho, double sigma = 1.0);

/// Model description independent of any sample. Finite-discrete levels may be
/// left unset and are then taken from the data when the model is built.
struct ModelSpec {
  Family family = Family::ExpBilinear;
  std::vector<BasisPair> basis;
  Range alpha = RatioModel::kDefaultRange;
  Range beta = RatioModel::kDefaultRange;
  std::optional<Levels> levels;

  /// Parses "expbilinear:<terms>", "gaussian", "finite" or "fgm". Terms are
  /// ';'-separated "xi,zeta" pairs; "xy", "x2", "y2" and "x2y2" are accepted
  /// as single-token shorthands.
  static ModelSpec parse(std::string_view descriptor);

  RatioModel build(const PairedSample& sample) const;
  RatioModel build() const;
  std::string descriptor() const;
};

}  // namespace phimi
