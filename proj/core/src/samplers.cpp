#include "phimi/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phimi/error.hpp"

namespace phimi {

PairedSample sample_finite(const FiniteMixtureSpec& spec, std::size_t n, Rng& rng) {
  if (spec.k < 2) throw ConfigError("finite mixture needs K >= 2");
  if (!(spec.theta >= 0.0 && spec.theta <= 1.0)) {
    throw DomainError("mixture weight", spec.theta, "[0, 1]");
  }
  std::vector<std::string> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = rng.index(spec.k);
    const std::size_t b = rng.uniform() < spec.theta ? a : rng.index(spec.k);
    x[i] = std::to_string(a + 1);
    y[i] = std::to_string(b + 1);
  }
  return PairedSample::categorical(std::move(x), std::move(y));
}

PairedSample sample_gaussian(const GaussianSpec& spec, std::size_t n, Rng& rng) {
  if (!(std::abs(spec.rho) < 1.0)) throw DomainError("correlation", spec.rho, "(-1, 1)");
  if (!(spec.sigma > 0.0)) throw DomainError("standard deviation", spec.sigma, "(0, inf)");
  const double c = std::sqrt((1.0 - spec.rho) * (1.0 + spec.rho));
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng.normal();
    const double e = rng.normal();
    x[i] = spec.sigma * z;
    y[i] = spec.sigma * (spec.rho * z + c * e);
  }
  return PairedSample::real(std::move(x), std::move(y));
}

double fgm_conditional_inverse(double theta, double u, double w) {
  const double a = theta * (1.0 - 2.0 * u);
  if (std::abs(a) < 1e-12) return w;
  const double b = 1.0 + a;
  const double disc = b * b - 4.0 * a * w;
  if (disc < 0.0) throw DomainError("FGM discriminant", disc, "[0, inf)");
  const double denom = b + std::sqrt(disc);
  // denom vanishes only at a = -1, w = 0, where the root is 0
  return denom > 0.0 ? std::min(1.0, 2.0 * w / denom) : 0.0;
}

PairedSample sample_fgm(const FgmSpec& spec, std::size_t n, Rng& rng) {
  if (!(std::abs(spec.theta) <= 1.0)) throw DomainError("FGM parameter", spec.theta, "[-1, 1]");
  std::vector<double> u(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = rng.uniform();
    v[i] = fgm_conditional_inverse(spec.theta, u[i], rng.uniform());
  }
  return PairedSample::real(std::move(u), std::move(v));
}

PairedSample sample_finite(const FiniteMixtureSpec& spec, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_finite(spec, n, rng);
}

PairedSample sample_gaussian(const GaussianSpec& spec, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_gaussian(spec, n, rng);
}

PairedSample sample_fgm(const FgmSpec& spec, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_fgm(spec, n, rng);
}

}  // namespace phimi
