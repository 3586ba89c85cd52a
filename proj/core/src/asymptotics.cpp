#include "phimi/asymptotics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>

#include "phimi/distributions.hpp"
#include "phimi/error.hpp"

namespace phimi {

namespace {

constexpr double kEigenFloor = 1e-12;
constexpr double kMaxCondition = 1e12;
constexpr std::size_t kZtzChunk = 8192;

enum : std::uint64_t { kStreamX = 1, kStreamY = 2, kStreamZ = 3 };

struct Moments {
  Eigen::VectorXd mean;    // E[V]
  Eigen::MatrixXd second;  // E[V V^T]
};

void check_family(const RatioModel& model) {
  if (!model.is_exponential()) {
    throw RouteMismatch("asymptotic covariances need an exponential ratio model");
  }
}

// V = (1, xi_1..xi_d, zeta_1..zeta_d, xi_1 zeta_1..xi_d zeta_d).
void fill_v(std::span<const double> xi, std::span<const double> zeta, Eigen::VectorXd& v) {
  const std::size_t d = xi.size();
  v[0] = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    v[static_cast<Eigen::Index>(1 + k)] = xi[k];
    v[static_cast<Eigen::Index>(1 + d + k)] = zeta[k];
    v[static_cast<Eigen::Index>(1 + 2 * d + k)] = xi[k] * zeta[k];
  }
}

Moments product_moments(const RatioModel& model, const Margin& mx, const Margin& my,
                        std::size_t m, std::uint64_t seed) {
  check_family(model);
  const std::size_t d = model.terms();
  const auto dim = static_cast<Eigen::Index>(1 + 3 * d);
  Moments mom{Eigen::VectorXd::Zero(dim), Eigen::MatrixXd::Zero(dim, dim)};
  Eigen::VectorXd v(dim);

  if (mx.is_discrete() && my.is_discrete()) {
    const auto& xv = mx.values();
    const auto& yv = my.values();
    std::vector<double> xi(xv.size() * d), zeta(yv.size() * d);
    for (std::size_t a = 0; a < xv.size(); ++a) {
      model.xi_values(xv[a], std::span(xi).subspan(a * d, d));
    }
    for (std::size_t b = 0; b < yv.size(); ++b) {
      model.zeta_values(yv[b], std::span(zeta).subspan(b * d, d));
    }
    for (std::size_t a = 0; a < xv.size(); ++a) {
      Eigen::MatrixXd row = Eigen::MatrixXd::Zero(dim, dim);
      Eigen::VectorXd row_mean = Eigen::VectorXd::Zero(dim);
      for (std::size_t b = 0; b < yv.size(); ++b) {
        fill_v(std::span(xi).subspan(a * d, d), std::span(zeta).subspan(b * d, d), v);
        const double w = my.probs()[b];
        row_mean += w * v;
        row.selfadjointView<Eigen::Lower>().rankUpdate(v, w);
      }
      mom.mean += mx.probs()[a] * row_mean;
      mom.second += mx.probs()[a] * row;
    }
  } else {
    if (m == 0) throw ConfigError("moment estimation needs at least one draw");
    Rng rx(derive_seed(seed, kStreamX)), ry(derive_seed(seed, kStreamY));
    std::vector<double> xi(d), zeta(d);
    for (std::size_t r = 0; r < m; ++r) {
      model.xi_values(mx.draw(rx), xi);
      model.zeta_values(my.draw(ry), zeta);
      fill_v(xi, zeta, v);
      mom.mean += v;
      mom.second.selfadjointView<Eigen::Lower>().rankUpdate(v, 1.0);
    }
    mom.mean /= static_cast<double>(m);
    mom.second /= static_cast<double>(m);
  }
  mom.second = mom.second.selfadjointView<Eigen::Lower>();
  return mom;
}

Eigen::MatrixXd sigma1_from(const Moments& mom, std::size_t d) {
  const auto dim = static_cast<Eigen::Index>(1 + d);
  std::vector<Eigen::Index> idx{0};
  for (std::size_t k = 0; k < d; ++k) idx.push_back(static_cast<Eigen::Index>(1 + 2 * d + k));
  Eigen::MatrixXd s(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) s(r, c) = mom.second(idx[r], idx[c]);
  }
  return 0.5 * (s + s.transpose());
}

Eigen::MatrixXd sigma2_from(const Moments& mom, std::size_t d) {
  const Eigen::MatrixXd cov = mom.second - mom.mean * mom.mean.transpose();
  const auto dd = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dd, cov.rows());
  for (Eigen::Index k = 0; k < dd; ++k) {
    jac(k, 1 + k) = mom.mean[1 + dd + k];
    jac(k, 1 + dd + k) = mom.mean[1 + k];
    jac(k, 1 + 2 * dd + k) = -1.0;
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dd + 1, dd + 1);
  s.bottomRightCorner(dd, dd) = jac * cov * jac.transpose();
  return 0.5 * (s + s.transpose());
}

void check_condition(const Eigen::MatrixXd& sigma1) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma1, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw SingularityError("sigma1 is singular or ill-conditioned (eigenvalues " +
                           std::to_string(lo) + " .. " + std::to_string(hi) + ")");
  }
}

}  // namespace

Margin Margin::normal(double mean, double sd) {
  if (!(sd > 0.0)) throw DomainError("normal margin sd", sd, "(0, inf)");
  Margin m;
  m.kind_ = Kind::Normal;
  m.p1_ = mean;
  m.p2_ = sd;
  return m;
}

Margin Margin::uniform(double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("uniform margin needs lo < hi");
  Margin m;
  m.kind_ = Kind::Uniform;
  m.p1_ = lo;
  m.p2_ = hi;
  return m;
}

Margin Margin::discrete(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size()) {
    throw LengthMismatch("discrete margin needs one probability per value");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw DomainError("probability", p, "[0, inf)");
    total += p;
  }
  if (!(total > 0.0)) throw DegenerateInput("discrete margin has zero total mass");
  Margin m;
  m.kind_ = Kind::Discrete;
  m.values_ = std::move(values);
  m.probs_ = std::move(probs);
  double acc = 0.0;
  for (double& p : m.probs_) {
    p /= total;
    acc += p;
    m.cumulative_.push_back(acc);
  }
  return m;
}

Margin Margin::empirical(std::span<const double> values) {
  std::map<double, double> counts;
  for (double v : values) counts[v] += 1.0;
  std::vector<double> vals, probs;
  for (const auto& [v, c] : counts) {
    vals.push_back(v);
    probs.push_back(c);
  }
  return discrete(std::move(vals), std::move(probs));
}

double Margin::draw(Rng& rng) const {
  switch (kind_) {
    case Kind::Normal: return p1_ + p2_ * rng.normal();
    case Kind::Uniform: return p1_ + (p2_ - p1_) * rng.uniform();
    case Kind::Discrete: {
      const double u = rng.uniform();
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                           values_.size() - 1);
      return values_[k];
    }
  }
  return 0.0;
}

std::pair<Margin, Margin> sample_margins(const RatioModel& model, const PairedSample& sample) {
  if (model.family() == Family::FiniteDiscrete) {
    const Levels& lv = model.levels();
    std::vector<double> cx(lv.k1(), 0.0), cy(lv.k2(), 0.0), vx(lv.k1()), vy(lv.k2());
    for (std::size_t i = 0; i < sample.size(); ++i) {
      cx[lv.x_code(sample.x_tokens()[i])] += 1.0;
      cy[lv.y_code(sample.y_tokens()[i])] += 1.0;
    }
    for (std::size_t a = 0; a < vx.size(); ++a) vx[a] = static_cast<double>(a);
    for (std::size_t b = 0; b < vy.size(); ++b) vy[b] = static_cast<double>(b);
    return {Margin::discrete(std::move(vx), std::move(cx)),
            Margin::discrete(std::move(vy), std::move(cy))};
  }
  if (!sample.is_real()) throw SupportError("real-valued model given categorical data");
  return {Margin::empirical(sample.x()), Margin::empirical(sample.y())};
}

Eigen::MatrixXd sigma1_under_h0(const RatioModel& model, const Margin& mx, const Margin& my,
                                std::size_t m, std::uint64_t seed) {
  Eigen::MatrixXd s = sigma1_from(product_moments(model, mx, my, m, seed), model.terms());
  check_condition(s);
  return s;
}

Eigen::MatrixXd sigma2_under_h0(const RatioModel& model, const Margin& mx, const Margin& my,
                                std::size_t m, std::uint64_t seed) {
  return sigma2_from(product_moments(model, mx, my, m, seed), model.terms());
}

AsymptoticCovariances AsymptoticCovariances::compute(const RatioModel& model,
                                                     const Margin& mx, const Margin& my,
                                                     std::size_t m, std::uint64_t seed) {
  const Moments mom = product_moments(model, mx, my, m, seed);
  return from_matrices(sigma1_from(mom, model.terms()), sigma2_from(mom, model.terms()));
}

AsymptoticCovariances AsymptoticCovariances::from_matrices(Eigen::MatrixXd sigma1,
                                                           Eigen::MatrixXd sigma2) {
  if (sigma1.rows() != sigma1.cols() || sigma1.rows() != sigma2.rows() ||
      sigma2.rows() != sigma2.cols()) {
    throw LengthMismatch("covariance matrices must be square and of equal size");
  }
  check_condition(sigma1);
  AsymptoticCovariances cov;
  cov.sigma1 = 0.5 * (sigma1 + sigma1.transpose());
  cov.sigma2 = 0.5 * (sigma2 + sigma2.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.sigma1);
  const Eigen::VectorXd inv_sqrt =
      es.eigenvalues().cwiseMax(kEigenFloor).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd root =
      es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd c = root * cov.sigma2 * root;
  cov.c_matrix = 0.5 * (c + c.transpose());
  return cov;
}

std::vector<double> sample_ztz(const AsymptoticCovariances& cov, std::size_t n_draws,
                               std::uint64_t seed) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov.c_matrix, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(0.0);
  std::vector<double> out(n_draws);
  const std::uint64_t base = derive_seed(seed, kStreamZ);
  for (std::size_t start = 0; start < n_draws; start += kZtzChunk) {
    Rng rng = Rng::stream(base, start / kZtzChunk);
    const std::size_t stop = std::min(n_draws, start + kZtzChunk);
    for (std::size_t r = start; r < stop; ++r) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        const double e = rng.normal();
        s += lambda[k] * e * e;
      }
      out[r] = s;
    }
  }
  return out;
}

double limit_quantile_ztz(const AsymptoticCovariances& cov, double alpha,
                          std::size_t n_draws, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("test level", alpha, "(0, 1)");
  if (n_draws == 0) throw ConfigError("need at least one draw of Z^T Z");
  return empirical_quantile(sample_ztz(cov, n_draws, seed), 1.0 - alpha);
}

std::size_t chisq_df_finite(std::size_t k1, std::size_t k2) {
  if (k1 < 2 || k2 < 2) {
    throw DomainError("finite-discrete level count", static_cast<double>(std::min(k1, k2)),
                      "[2, inf)");
  }
  return (k1 - 1) * (k2 - 1);
}

}  // namespace phimi
