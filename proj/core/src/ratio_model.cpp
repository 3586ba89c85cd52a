#include "phimi/ratio_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phimi/error.hpp"

namespace phimi {

namespace {

double one(double) { return 1.0; }
double identity(double v) { return v; }
double square(double v) { return v * v; }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

Box make_box(std::size_t dim, bool intercept, Range alpha, Range beta) {
  for (const Range& r : {alpha, beta}) {
    if (!(r.lo < r.hi)) throw ConfigError("empty parameter range");
  }
  Box box{Eigen::VectorXd(dim), Eigen::VectorXd(dim)};
  for (std::size_t k = 0; k < dim; ++k) {
    const Range r = (intercept && k == 0) ? alpha : beta;
    box.lower[static_cast<Eigen::Index>(k)] = r.lo;
    box.upper[static_cast<Eigen::Index>(k)] = r.hi;
  }
  return box;
}

void check_theta(const RatioModel& model, const ParamVector& theta) {
  if (static_cast<std::size_t>(theta.size()) != model.dimension()) {
    throw BoundsError("parameter has dimension " + std::to_string(theta.size()) +
                      ", model expects " + std::to_string(model.dimension()));
  }
  if (!model.bounds().contains(theta)) {
    throw BoundsError("parameter outside the model's box constraints");
  }
}

BasisPair parse_term(const std::string& term) {
  if (term == "xy") return {basis_function("x"), basis_function("y")};
  if (term == "x2") return {basis_function("x2"), basis_function("1")};
  if (term == "y2") return {basis_function("1"), basis_function("y2")};
  if (term == "x2y2") return {basis_function("x2"), basis_function("y2")};
  const auto parts = split(term, ',');
  if (parts.size() != 2) {
    throw ConfigError("basis term '" + term + "' is not of the form xi,zeta");
  }
  return {basis_function(parts[0]), basis_function(parts[1])};
}

}  // namespace

bool Box::contains(const ParamVector& theta) const {
  if (theta.size() != lower.size()) return false;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    if (!(theta[k] >= lower[k] && theta[k] <= upper[k])) return false;
  }
  return true;
}

ParamVector Box::clamp(const ParamVector& theta) const {
  return theta.cwiseMax(lower).cwiseMin(upper);
}

UnivariateBasis basis_function(std::string_view name) {
  const std::string key = trim(name);
  if (key == "1") return {"1", &one};
  if (key == "x") return {"x", &identity};
  if (key == "y") return {"y", &identity};
  if (key == "x2") return {"x2", &square};
  if (key == "y2") return {"y2", &square};
  throw ConfigError("unknown basis function '" + key + "'");
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::ExpBilinear: return "expbilinear";
    case Family::FiniteDiscrete: return "finite";
    case Family::CopulaFGM: return "fgm";
  }
  return "?";
}

RatioModel RatioModel::exp_bilinear(std::vector<BasisPair> basis, Range alpha,
                                    Range beta) {
  if (basis.empty()) throw ConfigError("exponential model needs at least one term");
  for (const auto& p : basis) {
    if (!p.xi.fn || !p.zeta.fn) throw ConfigError("basis pair without a function");
    if (p.xi.is_constant() && p.zeta.is_constant()) {
      throw ConfigError("term 1,1 duplicates the intercept");
    }
  }
  RatioModel m;
  m.family_ = Family::ExpBilinear;
  m.bounds_ = make_box(1 + basis.size(), true, alpha, beta);
  m.basis_ = std::move(basis);
  return m;
}

RatioModel RatioModel::finite_discrete(Levels levels, Range alpha, Range beta) {
  if (levels.k1() < 2 || levels.k2() < 2) {
    throw ConfigError("finite-discrete model needs at least 2 levels per variable");
  }
  RatioModel m;
  m.family_ = Family::FiniteDiscrete;
  m.bounds_ = make_box(levels.k1() * levels.k2(), true, alpha, beta);
  m.levels_ = std::move(levels);
  return m;
}

RatioModel RatioModel::copula_fgm(Range theta) {
  if (theta.lo < -1.0 || theta.hi > 1.0) {
    throw ConfigError("FGM parameter range must lie within [-1, 1]");
  }
  RatioModel m;
  m.family_ = Family::CopulaFGM;
  m.bounds_ = make_box(1, false, theta, theta);
  return m;
}

std::size_t RatioModel::terms() const noexcept {
  switch (family_) {
    case Family::ExpBilinear: return basis_.size();
    case Family::FiniteDiscrete: return levels_.k1() * levels_.k2() - 1;
    case Family::CopulaFGM: return 1;
  }
  return 0;
}

RatioModel RatioModel::with_bounds(Range alpha, Range beta) const {
  switch (family_) {
    case Family::ExpBilinear: return exp_bilinear(basis_, alpha, beta);
    case Family::FiniteDiscrete: return finite_discrete(levels_, alpha, beta);
    case Family::CopulaFGM: return copula_fgm(beta);
  }
  return *this;
}

std::string RatioModel::descriptor() const {
  if (family_ != Family::ExpBilinear) return std::string(family_name(family_));
  std::string out = "expbilinear:";
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    if (k) out += ';';
    out += basis_[k].name();
  }
  return out;
}

std::size_t RatioModel::cell_index(std::size_t i, std::size_t j) const noexcept {
  if (i == 0 && j == 0) return npos;
  return i * levels_.k2() + j - 1;
}

void RatioModel::xi_values(double x, std::span<double> out) const {
  if (family_ == Family::ExpBilinear) {
    for (std::size_t k = 0; k < basis_.size(); ++k) out[k] = basis_[k].xi(x);
    return;
  }
  if (family_ == Family::FiniteDiscrete) {
    const std::size_t k2 = levels_.k2();
    for (std::size_t i = 0; i < levels_.k1(); ++i) {
      const double ind = (static_cast<double>(i) == x) ? 1.0 : 0.0;
      for (std::size_t j = 0; j < k2; ++j) {
        const std::size_t k = cell_index(i, j);
        if (k != npos) out[k] = ind;
      }
    }
    return;
  }
  throw ConfigError("factor values are only defined for exponential families");
}

void RatioModel::zeta_values(double y, std::span<double> out) const {
  if (family_ == Family::ExpBilinear) {
    for (std::size_t k = 0; k < basis_.size(); ++k) out[k] = basis_[k].zeta(y);
    return;
  }
  if (family_ == Family::FiniteDiscrete) {
    const std::size_t k2 = levels_.k2();
    for (std::size_t i = 0; i < levels_.k1(); ++i) {
      for (std::size_t j = 0; j < k2; ++j) {
        const std::size_t k = cell_index(i, j);
        if (k != npos) out[k] = (static_cast<double>(j) == y) ? 1.0 : 0.0;
      }
    }
    return;
  }
  throw ConfigError("factor values are only defined for exponential families");
}

double h_eval(const RatioModel& model, const ParamVector& theta, double x, double y) {
  check_theta(model, theta);
  switch (model.family()) {
    case Family::ExpBilinear: {
      double e = theta[0];
      const auto& basis = model.basis();
      for (std::size_t k = 0; k < basis.size(); ++k) {
        e += theta[static_cast<Eigen::Index>(k + 1)] * basis[k].xi(x) * basis[k].zeta(y);
      }
      return std::exp(e);
    }
    case Family::CopulaFGM:
      if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
        throw SupportError("copula arguments must lie in [0, 1]^2");
      }
      return 1.0 + theta[0] * (1.0 - 2.0 * x) * (1.0 - 2.0 * y);
    case Family::FiniteDiscrete:
      break;
  }
  throw SupportError("finite-discrete model evaluated at real arguments");
}

double h_eval(const RatioModel& model, const ParamVector& theta, const std::string& x,
              const std::string& y) {
  if (model.family() != Family::FiniteDiscrete) {
    throw SupportError("categorical arguments need a finite-discrete model");
  }
  check_theta(model, theta);
  const std::size_t k = model.cell_index(model.levels().x_code(x), model.levels().y_code(y));
  const double e = theta[0] + (k == RatioModel::npos ? 0.0 : theta[static_cast<Eigen::Index>(k + 1)]);
  return std::exp(e);
}

ParamVector h_grad(const RatioModel& model, const ParamVector& theta, double x, double y) {
  const double h = h_eval(model, theta, x, y);
  ParamVector g(theta.size());
  if (model.family() == Family::CopulaFGM) {
    g[0] = (1.0 - 2.0 * x) * (1.0 - 2.0 * y);
    return g;
  }
  g[0] = h;
  const auto& basis = model.basis();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    g[static_cast<Eigen::Index>(k + 1)] = h * basis[k].xi(x) * basis[k].zeta(y);
  }
  return g;
}

ParamVector h_grad(const RatioModel& model, const ParamVector& theta,
                   const std::string& x, const std::string& y) {
  const double h = h_eval(model, theta, x, y);
  ParamVector g = ParamVector::Zero(theta.size());
  g[0] = h;
  const std::size_t k = model.cell_index(model.levels().x_code(x), model.levels().y_code(y));
  if (k != RatioModel::npos) g[static_cast<Eigen::Index>(k + 1)] = h;
  return g;
}

RatioModel gaussian_model(Range alpha, Range beta) {
  return RatioModel::exp_bilinear({{basis_function("x2"), basis_function("1")},
                                   {basis_function("1"), basis_function("y2")},
                                   {basis_function("x"), basis_function("y")}},
                                  alpha, beta);
}

ParamVector gaussian_parameter(double rho, double sigma) {
  if (!(std::abs(rho) < 1.0) || !(sigma > 0.0)) {
    throw DomainError("gaussian_parameter requires |rho| < 1", rho, "(-1, 1)");
  }
  const double one_minus = 1.0 - rho * rho;
  const double s2 = sigma * sigma;
  ParamVector theta(4);
  theta[0] = -0.5 * std::log(one_minus);
  theta[1] = -rho * rho / (2.0 * s2 * one_minus);
  theta[2] = theta[1];
  theta[3] = rho / (s2 * one_minus);
  return theta;
}

ModelSpec ModelSpec::parse(std::string_view descriptor) {
  const std::string text = trim(descriptor);
  ModelSpec spec;
  if (text == "gaussian") {
    spec.basis = gaussian_model().basis();
    return spec;
  }
  if (text == "finite") {
    spec.family = Family::FiniteDiscrete;
    return spec;
  }
  if (text == "fgm") {
    spec.family = Family::CopulaFGM;
    spec.beta = RatioModel::kDefaultFgmRange;
    return spec;
  }
  const std::string prefix = "expbilinear:";
  if (text.rfind(prefix, 0) != 0) {
    throw ConfigError("unknown model descriptor '" + text + "'");
  }
  for (const auto& term : split(std::string_view(text).substr(prefix.size()), ';')) {
    if (term.empty()) continue;
    spec.basis.push_back(parse_term(term));
  }
  if (spec.basis.empty()) throw ConfigError("model descriptor lists no basis terms");
  return spec;
}

RatioModel ModelSpec::build(const PairedSample& sample) const {
  if (family == Family::FiniteDiscrete && !levels) {
    return RatioModel::finite_discrete(Levels::observed(sample), alpha, beta);
  }
  return build();
}

RatioModel ModelSpec::build() const {
  switch (family) {
    case Family::ExpBilinear: return RatioModel::exp_bilinear(basis, alpha, beta);
    case Family::FiniteDiscrete:
      if (!levels) throw ConfigError("finite-discrete model without levels");
      return RatioModel::finite_discrete(*levels, alpha, beta);
    case Family::CopulaFGM: return RatioModel::copula_fgm(beta);
  }
  throw ConfigError("unknown model family");
}

std::string ModelSpec::descriptor() const {
  if (family != Family::ExpBilinear) return std::string(family_name(family));
  std::string out = "expbilinear:";
  for (std::size_t k = 0; k < basis.size(); ++k) {
    if (k) out += ';';
    out += basis[k].name();
  }
  return out;
}

}  // namespace phimi
