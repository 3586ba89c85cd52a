#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "phimi/error.hpp"
#include "phimi/objective.hpp"
#include "phimi/rng.hpp"
#include "phimi/samplers.hpp"

namespace phimi {
namespace {

// Direct O(n^2) evaluation through h_eval and the divergence functions.
double brute_force(const Divergence& d, const RatioModel& m, const PairedSample& s,
                   const ParamVector& theta) {
  const std::size_t n = s.size();
  std::vector<double> xs = s.x(), ys = s.y();
  if (m.family() == Family::CopulaFGM) {
    const EmpiricalMargins r = rank_transform(s.x(), s.y());
    xs = r.u;
    ys = r.v;
  }
  auto h = [&](std::size_t i, std::size_t j) {
    return s.is_real() ? h_eval(m, theta, xs[i], ys[j])
                       : h_eval(m, theta, s.x_tokens()[i], s.y_tokens()[j]);
  };
  long double first = 0, second = 0;
  for (std::size_t i = 0; i < n; ++i) {
    first += d.phi_prime(h(i, i));
    for (std::size_t j = 0; j < n; ++j) second += d.conj_of_prime(h(i, j));
  }
  return static_cast<double>(first / n - second / (static_cast<long double>(n) * n));
}

RatioModel rich_model() {
  return ModelSpec::parse("expbilinear:x,y;x2,1;x,y2;1,y").build();
}

TEST(Objective, ZeroAtNullParameter) {
  for (double g : {0.0, 1.0, -1.0, 2.0, 0.5}) {
    const ObjectiveContext a(Divergence(g), gaussian_model(), sample_gaussian({0.7}, 40, 1));
    EXPECT_EQ(a.objective(a.model().null_parameter()), 0.0);
    const ObjectiveContext b(Divergence(g), RatioModel::finite_discrete(Levels::numbered(3, 3)),
                             sample_finite({3, 0.4}, 40, 2));
    EXPECT_EQ(b.objective(b.model().null_parameter()), 0.0);
  }
}

TEST(Objective, TwoByTwoAtLogRatioEqualsPlugin) {
  // counts [[2,1],[1,2]]
  const PairedSample s = PairedSample::categorical({"a", "a", "a", "b", "b", "b"},
                                                   {"u", "u", "v", "u", "v", "v"});
  const RatioModel m = RatioModel::finite_discrete(Levels::observed(s));
  const ObjectiveContext ctx(Divergence::kl(), m, s);
  // p_ab / (p_a p_b) = (2/6) / (1/4) = 4/3 on the diagonal, 2/3 off it.
  ParamVector t = m.null_parameter();
  t[0] = std::log(4.0 / 3.0);
  t[1 + m.cell_index(0, 1)] = std::log(0.5);
  t[1 + m.cell_index(1, 0)] = std::log(0.5);
  const double plugin = 2 * (1.0 / 3) * std::log(4.0 / 3) + 2 * (1.0 / 6) * std::log(2.0 / 3);
  EXPECT_NEAR(ctx.objective(t), plugin, 1e-15);
}

TEST(Objective, BalancedTableHasZeroGradientAtNull) {
  std::vector<std::string> x, y;
  for (const char* a : {"1", "2", "3"})
    for (const char* b : {"1", "2"})
      for (int r = 0; r < 4; ++r) {
        x.push_back(a);
        y.push_back(b);
      }
  const PairedSample s = PairedSample::categorical(x, y);
  for (double g : {1.0, 2.0, 0.5}) {
    const ObjectiveContext ctx(Divergence(g), RatioModel::finite_discrete(Levels::observed(s)), s);
    EXPECT_LT(ctx.gradient(ctx.model().null_parameter()).lpNorm<Eigen::Infinity>(), 1e-15);
  }
}

TEST(Objective, MatchesBruteForce) {
  Rng rng(3);
  for (double g : {0.0, 1.0, -1.0, 2.0, 0.5, 1.5}) {
    const Divergence d(g);
    const PairedSample real = sample_gaussian({0.5}, 30, rng);
    ParamVector t(5);
    t << 0.1, 0.2, -0.15, 0.05, -0.1;
    const ObjectiveContext a(d, rich_model(), real);
    const ObjectiveValue v = a.evaluate(t);
    if (v.feasible) EXPECT_NEAR(v.value, brute_force(d, rich_model(), real, t), 1e-12) << g;

    const PairedSample cat = sample_finite({3, 0.3}, 30, rng);
    const RatioModel f = RatioModel::finite_discrete(Levels::numbered(3, 3));
    ParamVector tf(9);
    for (Eigen::Index k = 0; k < tf.size(); ++k) tf[k] = 0.2 * (2 * rng.uniform() - 1);
    const ObjectiveContext b(d, f, cat);
    EXPECT_NEAR(b.objective(tf), brute_force(d, f, cat, tf), 1e-12) << g;

    const PairedSample cop = sample_fgm({0.5}, 30, rng);
    ParamVector tc(1);
    tc << 0.6;
    const ObjectiveContext c(d, RatioModel::copula_fgm(), cop);
    EXPECT_NEAR(c.objective(tc), brute_force(d, RatioModel::copula_fgm(), cop, tc), 1e-12) << g;
  }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  const double h = 1e-5;
  for (int c = 0; c < 20; ++c) {
    const Divergence d(std::vector<double>{1.0, 2.0, 0.5, 0.0, -1.0}[c % 5]);
    std::optional<ObjectiveContext> ctx;
    if (c % 3 == 0) ctx.emplace(d, rich_model(), sample_gaussian({0.3}, 25, rng));
    if (c % 3 == 1)
      ctx.emplace(d, RatioModel::finite_discrete(Levels::numbered(3, 3)),
                  sample_finite({3, 0.2}, 25, rng));
    if (c % 3 == 2) ctx.emplace(d, RatioModel::copula_fgm(), sample_fgm({-0.4}, 25, rng));
    ParamVector t(ctx->model().dimension());
    for (Eigen::Index k = 0; k < t.size(); ++k) t[k] = 0.2 * (2 * rng.uniform() - 1);
    const ParamVector g = ctx->gradient(t);
    for (Eigen::Index k = 0; k < t.size(); ++k) {
      ParamVector tp = t, tm = t;
      tp[k] += h;
      tm[k] -= h;
      const double fd = (ctx->objective(tp) - ctx->objective(tm)) / (2 * h);
      EXPECT_LE(std::abs(fd - g[k]), 1e-5 * std::max(std::abs(g[k]), 1e-3)) << c << " " << k;
    }
  }
}

TEST(Objective, DoubleSumDependsOnlyOnMargins) {
  Rng rng(5);
  const PairedSample s = sample_gaussian({0.8}, 40, rng);
  std::vector<std::size_t> id(40), perm(40);
  std::iota(id.begin(), id.end(), 0);
  perm = id;
  std::reverse(perm.begin(), perm.end());
  std::rotate(perm.begin(), perm.begin() + 7, perm.end());
  const PairedSample p = s.remix(id, perm);
  for (double g : {1.0, 2.0}) {
    const ObjectiveContext a(Divergence(g), rich_model(), s), b(Divergence(g), rich_model(), p);
    for (int r = 0; r < 5; ++r) {
      ParamVector t(5);
      for (Eigen::Index k = 0; k < 5; ++k) t[k] = 0.3 * (2 * rng.uniform() - 1);
      // value = mean f - double sum; remove the first term by brute force
      auto first = [&](const PairedSample& q) {
        double acc = 0;
        for (std::size_t i = 0; i < q.size(); ++i)
          acc += Divergence(g).phi_prime(h_eval(rich_model(), t, q.x()[i], q.y()[i]));
        return acc / q.size();
      };
      EXPECT_NEAR(first(s) - a.objective(t), first(p) - b.objective(t), 1e-12);
    }
  }
}

TEST(Objective, InfeasibleAndOutOfBox) {
  // exp(10 * 30^2) overflows
  const PairedSample s = PairedSample::real({0.5, -1.0, 30.0}, {0.1, 0.2, 0.3});
  const ObjectiveContext ctx(Divergence::chi_square(), gaussian_model(), s);
  ParamVector t = ctx.model().null_parameter();
  t[1] = 10.0;
  const ObjectiveValue v = ctx.evaluate(t);
  EXPECT_FALSE(v.feasible);
  EXPECT_THROW(ctx.objective(t), ConjugateDomainError);
  t[0] = 20.0;
  EXPECT_THROW(ctx.objective(t), BoundsError);
  EXPECT_THROW(ctx.objective(ParamVector::Zero(3)), BoundsError);
}

TEST(Objective, SupportChecks) {
  const PairedSample real = sample_gaussian({0.0}, 20, 7);
  const PairedSample cat = sample_finite({2, 0.0}, 20, 7);
  EXPECT_THROW(ObjectiveContext(Divergence::kl(), RatioModel::finite_discrete(Levels::numbered(2, 2)), real),
               SupportError);
  EXPECT_THROW(ObjectiveContext(Divergence::kl(), gaussian_model(), cat), SupportError);
  EXPECT_THROW(ObjectiveContext(Divergence::kl(), RatioModel::finite_discrete(Levels({"x", "y"}, {"1", "2"})), cat),
               SupportError);
}

TEST(Objective, FiniteStartPointIsSaturatedMaximizer) {
  const PairedSample s = sample_finite({3, 0.3}, 60, 8);
  const ObjectiveContext ctx(Divergence::kl(), RatioModel::finite_discrete(Levels::numbered(3, 3)), s);
  EXPECT_LT(ctx.gradient(ctx.start_point()).lpNorm<Eigen::Infinity>(), 1e-12);
  const ObjectiveContext g(Divergence::kl(), gaussian_model(), sample_gaussian({0.2}, 20, 8));
  EXPECT_TRUE(g.start_point().isZero());
}

TEST(Objective, SubsetAndWithSample) {
  const PairedSample s = sample_gaussian({0.4}, 30, 9);
  const ObjectiveContext ctx(Divergence::kl(), gaussian_model(), s);
  std::vector<std::size_t> idx{1, 4, 9, 16, 25};
  ParamVector t(4);
  t << 0.1, -0.1, 0.05, 0.2;
  EXPECT_DOUBLE_EQ(ctx.subset(idx).objective(t), ctx.with_sample(s.subset(idx)).objective(t));
  EXPECT_EQ(ctx.subset(idx).size(), 5u);
}

}  // namespace
}  // namespace phimi
