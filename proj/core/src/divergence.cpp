#include "phimi/divergence.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "phimi/error.hpp"

namespace phimi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNearSingular = 1e-8;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

bool Interval::contains(double x) const noexcept {
  if (std::isnan(x)) return false;
  const bool above = lo_closed ? x >= lo : x > lo;
  const bool below = hi_closed ? x <= hi : x < hi;
  return above && below;
}

bool Interval::interior(double x) const noexcept {
  return !std::isnan(x) && x > lo && x < hi;
}

std::string Interval::str() const {
  std::ostringstream os;
  os << (lo_closed ? '[' : '(');
  if (std::isinf(lo)) os << "-inf"; else os << lo;
  os << ", ";
  if (std::isinf(hi)) os << "inf"; else os << hi;
  os << (hi_closed ? ']' : ')');
  return os.str();
}

Divergence::Divergence(double gamma) : gamma_(gamma) {
  if (!std::isfinite(gamma)) {
    throw DomainError("divergence index must be finite", gamma, "(-inf, inf)");
  }
  if ((gamma != 0.0 && std::abs(gamma) < kNearSingular) ||
      (gamma != 1.0 && std::abs(gamma - 1.0) < kNearSingular)) {
    throw DomainError("divergence index too close to a singular member", gamma,
                      "R \\ ((-1e-8, 1e-8) u (1 - 1e-8, 1 + 1e-8)) u {0, 1}");
  }

  const Interval positive_open{0.0, kInf, false, false};
  const Interval positive_closed{0.0, kInf, true, false};
  const Interval real_line{-kInf, kInf, false, false};

  if (gamma == 0.0) {
    kind_ = DivergenceKind::ModifiedKL;
    dom_phi_ = positive_open;
    dom_conj_ = {-kInf, 1.0, false, false};
  } else if (gamma == 1.0) {
    kind_ = DivergenceKind::KL;
    dom_phi_ = positive_closed;
    dom_conj_ = real_line;
  } else if (gamma == -1.0) {
    kind_ = DivergenceKind::ModifiedChiSq;
    dom_phi_ = positive_open;
    dom_conj_ = {-kInf, 0.5, false, true};
  } else if (gamma == 2.0) {
    kind_ = DivergenceKind::ChiSq;
    dom_phi_ = real_line;
    dom_conj_ = real_line;
  } else if (gamma == 0.5) {
    kind_ = DivergenceKind::Hellinger;
    dom_phi_ = positive_closed;
    dom_conj_ = {-kInf, 2.0, false, false};
  } else {
    kind_ = DivergenceKind::Power;
    if (gamma < 0.0) {
      dom_phi_ = positive_open;
      dom_conj_ = {-kInf, 1.0 / (1.0 - gamma), false, true};
    } else if (gamma < 1.0) {
      dom_phi_ = positive_closed;
      dom_conj_ = {-kInf, 1.0 / (1.0 - gamma), false, false};
    } else {
      dom_phi_ = positive_closed;
      dom_conj_ = real_line;
    }
  }
}

Divergence Divergence::from_name(std::string_view name) {
  const std::string key = lower(name);
  if (key == "kl") return kl();
  if (key == "klm" || key == "modified-kl") return modified_kl();
  if (key == "chisq" || key == "chi2") return chi_square();
  if (key == "chisqm" || key == "chi2m" || key == "modified-chisq") {
    return modified_chi_square();
  }
  if (key == "hellinger") return hellinger();

  double gamma = 0.0;
  const char* first = key.data();
  const char* last = key.data() + key.size();
  auto [ptr, ec] = std::from_chars(first, last, gamma);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("unknown divergence '" + std::string(name) + "'");
  }
  return Divergence(gamma);
}

std::string Divergence::name() const {
  switch (kind_) {
    case DivergenceKind::ModifiedKL: return "klm";
    case DivergenceKind::KL: return "kl";
    case DivergenceKind::ModifiedChiSq: return "chisqm";
    case DivergenceKind::ChiSq: return "chisq";
    case DivergenceKind::Hellinger: return "hellinger";
    case DivergenceKind::Power: break;
  }
  std::ostringstream os;
  os << "power(" << gamma_ << ")";
  return os.str();
}

double Divergence::phi(double x) const {
  if (!dom_phi_.contains(x)) throw DomainError("phi", x, dom_phi_.str());
  switch (kind_) {
    case DivergenceKind::ModifiedKL: return -std::log(x) + x - 1.0;
    case DivergenceKind::KL: return x == 0.0 ? 1.0 : x * std::log(x) - x + 1.0;
    case DivergenceKind::ModifiedChiSq: return 0.5 * (x - 1.0) * (x - 1.0) / x;
    case DivergenceKind::ChiSq: return 0.5 * (x - 1.0) * (x - 1.0);
    case DivergenceKind::Hellinger: {
      const double r = std::sqrt(x) - 1.0;
      return 2.0 * r * r;
    }
    case DivergenceKind::Power: break;
  }
  return detail::power_phi(gamma_, x);
}

double Divergence::phi_prime(double x) const {
  if (!dom_phi_.interior(x)) throw DomainError("phi'", x, dom_phi_.str());
  switch (kind_) {
    case DivergenceKind::ModifiedKL: return 1.0 - 1.0 / x;
    case DivergenceKind::KL: return std::log(x);
    case DivergenceKind::ModifiedChiSq: return 0.5 * (1.0 - 1.0 / (x * x));
    case DivergenceKind::ChiSq: return x - 1.0;
    case DivergenceKind::Hellinger: return 2.0 - 2.0 / std::sqrt(x);
    case DivergenceKind::Power: break;
  }
  return std::expm1((gamma_ - 1.0) * std::log(x)) / (gamma_ - 1.0);
}

double Divergence::phi_second(double x) const {
  if (!dom_phi_.interior(x)) throw DomainError("phi''", x, dom_phi_.str());
  switch (kind_) {
    case DivergenceKind::ModifiedKL: return 1.0 / (x * x);
    case DivergenceKind::KL: return 1.0 / x;
    case DivergenceKind::ModifiedChiSq: return 1.0 / (x * x * x);
    case DivergenceKind::ChiSq: return 1.0;
    case DivergenceKind::Hellinger: return 1.0 / (x * std::sqrt(x));
    case DivergenceKind::Power: break;
  }
  return std::pow(x, gamma_ - 2.0);
}

double Divergence::phi_conj(double t) const {
  if (!dom_conj_.contains(t)) throw DomainError("phi*", t, dom_conj_.str());
  switch (kind_) {
    case DivergenceKind::ModifiedKL: return -std::log1p(-t);
    case DivergenceKind::KL: return std::expm1(t);
    case DivergenceKind::ModifiedChiSq: return 1.0 - std::sqrt(1.0 - 2.0 * t);
    case DivergenceKind::ChiSq: return 0.5 * t * t + t;
    case DivergenceKind::Hellinger: return 2.0 * t / (2.0 - t);
    case DivergenceKind::Power: break;
  }
  return detail::power_phi_conj(gamma_, t);
}

double Divergence::conj_of_prime(double x) const {
  if (!dom_phi_.interior(x)) throw DomainError("phi*(phi')", x, dom_phi_.str());
  switch (kind_) {
    case DivergenceKind::ModifiedKL: return std::log(x);
    case DivergenceKind::KL: return x - 1.0;
    case DivergenceKind::ModifiedChiSq: return 1.0 - 1.0 / x;
    case DivergenceKind::ChiSq: return 0.5 * (x * x - 1.0);
    case DivergenceKind::Hellinger: return 2.0 * (std::sqrt(x) - 1.0);
    case DivergenceKind::Power: break;
  }
  return std::expm1(gamma_ * std::log(x)) / gamma_;
}

double Divergence::f_of_log(double e) const noexcept {
  if (kind_ == DivergenceKind::KL) return e;
  if (kind_ == DivergenceKind::ModifiedKL) return -std::expm1(-e);
  return std::expm1((gamma_ - 1.0) * e) / (gamma_ - 1.0);
}

double Divergence::g_of_log(double e) const noexcept {
  if (kind_ == DivergenceKind::KL) return std::expm1(e);
  if (kind_ == DivergenceKind::ModifiedKL) return e;
  return std::expm1(gamma_ * e) / gamma_;
}

namespace detail {

double power_phi(double gamma, double x) {
  return (std::pow(x, gamma) - gamma * x + gamma - 1.0) / (gamma * (gamma - 1.0));
}

double power_phi_conj(double gamma, double t) {
  const double base = 1.0 + (gamma - 1.0) * t;
  // For gamma > 1 on dom_phi = [0, inf) the sup sits at x = 0 once phi'(0)
  // exceeds t.
  if (gamma > 1.0 && base <= 0.0) return -1.0 / gamma;
  return (std::pow(base, gamma / (gamma - 1.0)) - 1.0) / gamma;
}

}  // namespace detail

}  // namespace phimi
