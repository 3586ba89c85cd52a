#pragma once

#include <cstddef>
#include <cstdint>

#include "phimi/rng.hpp"
#include "phimi/sample.hpp"

namespace phimi {

/// Mixture of the uniform law on {1..K}^2 and the uniform law on its
/// diagonal: p(x, y) = (1 - theta) / K^2 + (theta / K) 1{x = y}.
struct FiniteMixtureSpec {
  std::size_t k = 2;
  double theta = 0.0;
};

/// Centered bivariate normal with correlation rho and marginal sd sigma.
struct GaussianSpec {
  double rho = 0.0;
  double sigma = 1.0;
};

/// Farlie-Gumbel-Morgenstern copula C(u, v) = uv (1 + theta (1 - u)(1 - v)).
struct FgmSpec {
  double theta = 0.0;
};

/// Categorical sample with tokens "1".."K". Per draw: x, then a uniform
/// deciding whether y copies x, then y if it does not.
PairedSample sample_finite(const FiniteMixtureSpec& spec, std::size_t n, Rng& rng);
/// y = rho x + sqrt(1 - rho^2) e, both scaled by sigma; x and e from
/// consecutive Box-Muller normals.
PairedSample sample_gaussian(const GaussianSpec& spec, std::size_t n, Rng& rng);
/// Pairs (u, v) in (0, 1)^2 by conditional inversion.
PairedSample sample_fgm(const FgmSpec& spec, std::size_t n, Rng& rng);

PairedSample sample_finite(const FiniteMixtureSpec& spec, std::size_t n, std::uint64_t seed);
PairedSample sample_gaussian(const GaussianSpec& spec, std::size_t n, std::uint64_t seed);
PairedSample sample_fgm(const FgmSpec& spec, std::size_t n, std::uint64_t seed);

/// Root in [0, 1] of v (1 + a (1 - v)) = w, a = theta (1 - 2u), written in
/// the cancellation-free form 2w / ((1 + a) + sqrt((1 + a)^2 - 4aw)).
double fgm_conditional_inverse(double theta, double u, double w);

}  // namespace phimi
