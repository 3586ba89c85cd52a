#pragma once

#include <functional>
#include <span>
#include <vector>

namespace phimi {

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);
/// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

double chisq_cdf(double x, double df);
/// Upper tail probability, accurate far into the tail.
double chisq_sf(double x, double df);
/// Inverse of chisq_cdf; p in (0, 1).
double chisq_quantile(double p, double df);

double normal_cdf(double z);
double normal_quantile(double p);
double student_t_cdf(double t, double df);
double student_t_quantile(double p, double df);

/// Empirical quantile at probability p by linear interpolation of the
/// empirical CDF: with h = m p, x_(floor h) + (h - floor h)(x_(floor h + 1) -
/// x_(floor h)), clamped to the extreme order statistics. For m = 1000 and
/// p = 0.95 this is the 950th order statistic. The input need not be sorted.
double empirical_quantile(std::vector<double> values, double p);

/// Two-sample Kolmogorov-Smirnov distance sup |F_a - F_b|.
double ks_distance(std::span<const double> a, std::span<const double> b);
/// One-sample Kolmogorov-Smirnov distance against a continuous CDF.
double ks_distance(std::span<const double> a, const std::function<double(double)>& cdf);

}  // namespace phimi
