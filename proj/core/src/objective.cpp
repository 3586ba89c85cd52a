#include "phimi/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phimi/error.hpp"
#include "phimi/summation.hpp"

namespace phimi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

ObjectiveContext::ObjectiveContext(Divergence divergence, RatioModel model,
                                   PairedSample sample)
    : divergence_(divergence), model_(std::move(model)), sample_(std::move(sample)) {
  const std::size_t n = sample_.size();
  switch (model_.family()) {
    case Family::ExpBilinear: {
      if (!sample_.is_real()) {
        throw SupportError("exponential-bilinear model needs real-valued data");
      }
      const std::size_t d = model_.terms();
      xi_.resize(n * d);
      zeta_.resize(n * d);
      for (std::size_t i = 0; i < n; ++i) {
        model_.xi_values(sample_.x()[i], std::span(xi_).subspan(i * d, d));
        model_.zeta_values(sample_.y()[i], std::span(zeta_).subspan(i * d, d));
      }
      break;
    }
    case Family::FiniteDiscrete: {
      if (sample_.is_real()) {
        throw SupportError("finite-discrete model needs categorical data");
      }
      const Levels& lv = model_.levels();
      counts_.assign(lv.k1() * lv.k2(), 0.0);
      row_.assign(lv.k1(), 0.0);
      col_.assign(lv.k2(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = lv.x_code(sample_.x_tokens()[i]);
        const std::size_t b = lv.y_code(sample_.y_tokens()[i]);
        counts_[a * lv.k2() + b] += 1.0;
        row_[a] += 1.0;
        col_[b] += 1.0;
      }
      break;
    }
    case Family::CopulaFGM: {
      if (!sample_.is_real()) throw SupportError("copula model needs real-valued data");
      margins_ = rank_transform(sample_.x(), sample_.y());
      a_.resize(n);
      b_.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        a_[i] = 1.0 - 2.0 * margins_.u[i];
        b_[i] = 1.0 - 2.0 * margins_.v[i];
      }
      break;
    }
  }
}

ObjectiveContext ObjectiveContext::with_sample(PairedSample sample) const {
  return ObjectiveContext(divergence_, model_, std::move(sample));
}

ObjectiveContext ObjectiveContext::subset(std::span<const std::size_t> index) const {
  return with_sample(sample_.subset(index));
}

void ObjectiveContext::check(const ParamVector& theta) const {
  if (static_cast<std::size_t>(theta.size()) != model_.dimension()) {
    throw BoundsError("parameter has dimension " + std::to_string(theta.size()) +
                      ", model expects " + std::to_string(model_.dimension()));
  }
  if (!model_.bounds().contains(theta)) {
    throw BoundsError("parameter outside the model's box constraints");
  }
}

ObjectiveValue ObjectiveContext::evaluate(const ParamVector& theta,
                                          bool with_gradient) const {
  check(theta);
  ObjectiveValue out;
  switch (model_.family()) {
    case Family::ExpBilinear: out = eval_bilinear(theta, with_gradient); break;
    case Family::FiniteDiscrete: out = eval_finite(theta, with_gradient); break;
    case Family::CopulaFGM: out = eval_copula(theta, with_gradient); break;
  }
  if (!std::isfinite(out.value) || (with_gradient && !out.gradient.allFinite())) {
    out.feasible = false;
  }
  return out;
}

double ObjectiveContext::objective(const ParamVector& theta) const {
  const ObjectiveValue v = evaluate(theta, false);
  if (!v.feasible) {
    throw ConjugateDomainError("phi'(h_theta) leaves the domain of the conjugate");
  }
  return v.value;
}

ParamVector ObjectiveContext::gradient(const ParamVector& theta) const {
  ObjectiveValue v = evaluate(theta, true);
  if (!v.feasible) {
    throw ConjugateDomainError("phi'(h_theta) leaves the domain of the conjugate");
  }
  return std::move(v.gradient);
}

ObjectiveValue ObjectiveContext::eval_bilinear(const ParamVector& theta,
                                               bool with_gradient) const {
  const std::size_t n = sample_.size();
  const std::size_t d = model_.terms();
  const auto& basis = model_.basis();
  const double gamma = divergence_.gamma();
  const double dn = static_cast<double>(n);

  // e_ij = s_i + t_j + sum over cross terms; terms with a constant factor
  // fold into the row or column offsets.
  std::vector<std::size_t> cross, zcols;
  std::vector<double> s(n, theta[0]), t(n, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    const double beta = theta[static_cast<Eigen::Index>(k + 1)];
    const bool cx = basis[k].xi.is_constant();
    const bool cz = basis[k].zeta.is_constant();
    if (!cz) zcols.push_back(k);
    if (cx) {
      for (std::size_t j = 0; j < n; ++j) t[j] += beta * zeta_[j * d + k];
    } else if (cz) {
      for (std::size_t i = 0; i < n; ++i) s[i] += beta * xi_[i * d + k];
    } else {
      cross.push_back(k);
    }
  }
  std::vector<double> cb(cross.size());
  for (std::size_t c = 0; c < cross.size(); ++c) {
    cb[c] = theta[static_cast<Eigen::Index>(cross[c] + 1)];
  }
  const std::size_t nc = cross.size();
  const std::size_t nz = zcols.size();
  std::vector<double> xrow(nc), zrow(nz * n);
  std::vector<double> ycross(nc * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < nc; ++c) ycross[j * nc + c] = zeta_[j * d + cross[c]];
    for (std::size_t z = 0; z < nz; ++z) zrow[j * nz + z] = zeta_[j * d + zcols[z]];
  }

  CompensatedSum fsum, gsum;
  ParamVector df = ParamVector::Zero(static_cast<Eigen::Index>(d + 1));
  ParamVector dg = ParamVector::Zero(static_cast<Eigen::Index>(d + 1));
  std::vector<double> q(nz);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < nc; ++c) xrow[c] = xi_[i * d + cross[c]];
    CompensatedSum row;
    double hsum = 0.0;
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      double e = s[i] + t[j];
      const double* yc = &ycross[j * nc];
      for (std::size_t c = 0; c < nc; ++c) e += cb[c] * xrow[c] * yc[c];
      const double m1 = std::expm1(gamma * e);
      row.add(gamma == 0.0 ? e : m1 / gamma);
      if (with_gradient) {
        const double p = 1.0 + m1;
        hsum += p;
        const double* zr = &zrow[j * nz];
        for (std::size_t z = 0; z < nz; ++z) q[z] += p * zr[z];
      }
    }
    gsum.add(row.value());

    double e_ii = s[i] + t[i];
    for (std::size_t c = 0; c < nc; ++c) e_ii += cb[c] * xrow[c] * ycross[i * nc + c];
    fsum.add(divergence_.f_of_log(e_ii));

    if (with_gradient) {
      const double w = std::exp((gamma - 1.0) * e_ii);
      df[0] += w;
      dg[0] += hsum;
      std::size_t z = 0;
      for (std::size_t k = 0; k < d; ++k) {
        const double xik = xi_[i * d + k];
        df[static_cast<Eigen::Index>(k + 1)] += w * xik * zeta_[i * d + k];
        const double qk = basis[k].zeta.is_constant() ? hsum : q[z++];
        dg[static_cast<Eigen::Index>(k + 1)] += xik * qk;
      }
    }
  }

  ObjectiveValue out;
  out.value = fsum.value() / dn - gsum.value() / (dn * dn);
  if (with_gradient) out.gradient = df / dn - dg / (dn * dn);
  return out;
}

ObjectiveValue ObjectiveContext::eval_finite(const ParamVector& theta,
                                             bool with_gradient) const {
  const Levels& lv = model_.levels();
  const double gamma = divergence_.gamma();
  const double dn = static_cast<double>(sample_.size());
  CompensatedSum value;
  ParamVector grad = ParamVector::Zero(theta.size());
  for (std::size_t a = 0; a < lv.k1(); ++a) {
    for (std::size_t b = 0; b < lv.k2(); ++b) {
      const std::size_t k = model_.cell_index(a, b);
      const double e =
          theta[0] + (k == RatioModel::npos ? 0.0 : theta[static_cast<Eigen::Index>(k + 1)]);
      const double w1 = counts_[a * lv.k2() + b] / dn;
      const double w2 = row_[a] * col_[b] / (dn * dn);
      double c = 0.0;
      if (w1 > 0.0) {
        value.add(w1 * divergence_.f_of_log(e));
        c += w1 * std::exp((gamma - 1.0) * e);
      }
      if (w2 > 0.0) {
        value.add(-w2 * divergence_.g_of_log(e));
        c -= w2 * std::exp(gamma * e);
      }
      if (with_gradient) {
        grad[0] += c;
        if (k != RatioModel::npos) grad[static_cast<Eigen::Index>(k + 1)] = c;
      }
    }
  }
  ObjectiveValue out;
  out.value = value.value();
  if (with_gradient) out.gradient = std::move(grad);
  return out;
}

ObjectiveValue ObjectiveContext::eval_copula(const ParamVector& theta,
                                             bool with_gradient) const {
  const std::size_t n = sample_.size();
  const double dn = static_cast<double>(n);
  const double th = theta[0];
  ObjectiveValue out;
  try {
    CompensatedSum fsum, gsum;
    double df = 0.0, dg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CompensatedSum row;
      for (std::size_t j = 0; j < n; ++j) {
        const double ab = a_[i] * b_[j];
        const double h = 1.0 + th * ab;
        row.add(divergence_.conj_of_prime(h));
        if (with_gradient) dg += h * divergence_.phi_second(h) * ab;
      }
      gsum.add(row.value());
      const double ab = a_[i] * b_[i];
      const double h = 1.0 + th * ab;
      fsum.add(divergence_.phi_prime(h));
      if (with_gradient) df += divergence_.phi_second(h) * ab;
    }
    out.value = fsum.value() / dn - gsum.value() / (dn * dn);
    if (with_gradient) {
      out.gradient = ParamVector::Constant(1, df / dn - dg / (dn * dn));
    }
  } catch (const DomainError&) {
    out.value = -kInf;
    out.feasible = false;
    if (with_gradient) out.gradient = ParamVector::Zero(1);
  }
  return out;
}

ParamVector ObjectiveContext::start_point() const {
  ParamVector theta = model_.null_parameter();
  if (model_.family() != Family::FiniteDiscrete) return theta;

  const Levels& lv = model_.levels();
  const double dn = static_cast<double>(sample_.size());
  auto log_ratio = [&](std::size_t a, std::size_t b) {
    if (row_[a] == 0.0 || col_[b] == 0.0) return 0.0;
    return std::log(counts_[a * lv.k2() + b] * dn / (row_[a] * col_[b]));
  };
  const Box& box = model_.bounds();
  const double alpha = std::clamp(log_ratio(0, 0), box.lower[0], box.upper[0]);
  theta[0] = alpha;
  for (std::size_t a = 0; a < lv.k1(); ++a) {
    for (std::size_t b = 0; b < lv.k2(); ++b) {
      const std::size_t k = model_.cell_index(a, b);
      if (k == RatioModel::npos) continue;
      const auto idx = static_cast<Eigen::Index>(k + 1);
      const double beta = log_ratio(a, b) - alpha;
      theta[idx] = std::isnan(beta) ? box.lower[idx]
                                    : std::clamp(beta, box.lower[idx], box.upper[idx]);
    }
  }
  return theta;
}

}  // namespace phimi
