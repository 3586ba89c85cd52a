#pragma once

#include <string>
#include <string_view>

namespace phimi {

/// Real interval with independently open or closed ends. Infinite ends are
/// always open.
struct Interval {
  double lo;
  double hi;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double x) const noexcept;
  bool interior(double x) const noexcept;
  std::string str() const;
};

enum class DivergenceKind {
  ModifiedKL,     // gamma = 0
  KL,             // gamma = 1
  ModifiedChiSq,  // gamma = -1
  ChiSq,          // gamma = 2
  Hellinger,      // gamma = 1/2
  Power,          // any other admissible gamma
};

/// Member phi_gamma of the power-divergence family, normalized so that
/// phi(1) = phi'(1) = 0 and phi''(1) = 1.
///
/// The five classical members are dispatched to their closed forms; every
/// other gamma uses (x^g - g x + g - 1) / (g (g - 1)). Values of gamma within
/// 1e-8 of 0 or 1 (but not equal) are rejected.
///
/// All member functions are const and thread-safe.
class Divergence {
 public:
  explicit Divergence(double gamma);

  static Divergence kl() { return Divergence(1.0); }
  static Divergence modified_kl() { return Divergence(0.0); }
  static Divergence chi_square() { return Divergence(2.0); }
  static Divergence modified_chi_square() { return Divergence(-1.0); }
  static Divergence hellinger() { return Divergence(0.5); }

  /// Accepts kl, klm, chisq, chisqm, hellinger (case-insensitive) or a
  /// number parsed as gamma.
  static Divergence from_name(std::string_view name);

  double gamma() const noexcept { return gamma_; }
  DivergenceKind kind() const noexcept { return kind_; }
  std::string name() const;

  const Interval& dom_phi() const noexcept { return dom_phi_; }
  const Interval& dom_conj() const noexcept { return dom_conj_; }

  double phi(double x) const;
  double phi_prime(double x) const;
  double phi_second(double x) const;
  double phi_conj(double t) const;

  /// x phi'(x) - phi(x), which equals phi_conj(phi_prime(x)).
  double conj_of_prime(double x) const;

  // Kernels for exponential ratio models h = exp(e). No domain checks: any
  // finite e maps into the interior of dom_phi.

  /// phi'(exp(e))
  double f_of_log(double e) const noexcept;
  /// phi*(phi'(exp(e)))
  double g_of_log(double e) const noexcept;

 private:
  double gamma_;
  DivergenceKind kind_;
  Interval dom_phi_;
  Interval dom_conj_;
};

namespace detail {
// Generic power-family formulas, valid for gamma outside {0, 1}. Exposed for
// cross-checking the closed forms.
double power_phi(double gamma, double x);
double power_phi_conj(double gamma, double t);
}  // namespace detail

}  // namespace phimi
