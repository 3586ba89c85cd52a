#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "phimi/divergence.hpp"
#include "phimi/error.hpp"

namespace phimi {
namespace {

const std::vector<double> kNamed{0.0, 1.0, -1.0, 2.0, 0.5};

std::vector<double> log_grid(double lo_exp, double hi_exp, int count) {
  std::vector<double> xs;
  for (int i = 0; i < count; ++i) {
    xs.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (count - 1)));
  }
  return xs;
}

TEST(Divergence, TabulatedValues) {
  EXPECT_DOUBLE_EQ(Divergence(1.0).phi(1.0), 0.0);
  EXPECT_NEAR(Divergence(2.0).phi(3.0), 2.0, 1e-15);
  EXPECT_NEAR(Divergence(0.0).phi(2.0), 1.0 - std::log(2.0), 1e-15);
  EXPECT_NEAR(Divergence(0.0).phi(2.0), 0.30685281944005469, 1e-14);

  EXPECT_DOUBLE_EQ(Divergence(1.0).phi_prime(1.0), 0.0);
  EXPECT_NEAR(Divergence(2.0).phi_prime(3.0), 2.0, 1e-15);
  for (double g : kNamed) EXPECT_NEAR(Divergence(g).phi_second(1.0), 1.0, 1e-14) << g;

  EXPECT_DOUBLE_EQ(Divergence(1.0).phi_conj(0.0), 0.0);
  EXPECT_NEAR(Divergence(2.0).phi_conj(1.0), 1.5, 1e-15);
  EXPECT_NEAR(Divergence(0.5).phi_conj(1.0), 2.0, 1e-15);

  EXPECT_DOUBLE_EQ(Divergence(1.0).conj_of_prime(1.0), 0.0);
  EXPECT_NEAR(Divergence(1.0).conj_of_prime(2.0), 1.0, 1e-15);
  EXPECT_NEAR(Divergence(2.0).conj_of_prime(3.0), 4.0, 1e-15);
}

TEST(Divergence, ZeroLogZeroConvention) {
  EXPECT_DOUBLE_EQ(Divergence::kl().phi(0.0), 1.0);
  EXPECT_TRUE(Divergence::kl().dom_phi().contains(0.0));
  EXPECT_THROW(Divergence::kl().phi(-1e-9), DomainError);
  EXPECT_THROW(Divergence::modified_kl().phi(0.0), DomainError);
}

TEST(Divergence, ConjugateIdentityOnGrid) {
  for (double g : kNamed) {
    const Divergence d(g);
    for (double x : log_grid(-3, 3, 50)) {
      const double t = d.phi_prime(x);
      if (!d.dom_conj().contains(t)) continue;
      EXPECT_NEAR(d.phi_conj(t), d.conj_of_prime(x), 1e-10 * std::max(1.0, std::abs(t)))
          << "gamma " << g << " x " << x;
    }
  }
}

TEST(Divergence, NonNegativeWithUniqueZero) {
  for (double g : {0.0, 1.0, -1.0, 2.0, 0.5, 1.5, -2.0, 3.0}) {
    const Divergence d(g);
    EXPECT_EQ(d.phi(1.0), 0.0);
    for (double x : log_grid(-2, 2, 41)) {
      if (x == 1.0) continue;
      EXPECT_GT(d.phi(x), 0.0) << g << " " << x;
    }
  }
}

TEST(Divergence, DerivativeStrictlyIncreasing) {
  for (double g : kNamed) {
    const Divergence d(g);
    double prev = -INFINITY;
    for (double x : log_grid(-3, 3, 200)) {
      const double v = d.phi_prime(x);
      EXPECT_GT(v, prev) << g << " " << x;
      prev = v;
    }
  }
}

TEST(Divergence, ClosedFormsMatchGeneralFormula) {
  for (double g : {-1.0, 2.0, 0.5}) {
    const Divergence d(g);
    for (double x : log_grid(-1.5, 1.5, 20)) {
      EXPECT_NEAR(d.phi(x), detail::power_phi(g, x), 1e-10) << g << " " << x;
      const double t = d.phi_prime(x);
      EXPECT_NEAR(d.phi_conj(t), detail::power_phi_conj(g, t), 1e-10) << g << " " << t;
    }
  }
  // gamma 0 and 1 are limits of the general formula.
  for (double x : log_grid(-1.5, 1.5, 20)) {
    const double kl = Divergence(1.0).phi(x), klm = Divergence(0.0).phi(x);
    EXPECT_NEAR(kl, detail::power_phi(1.0 + 1e-6, x), 1e-5 * std::max(1.0, kl));
    EXPECT_NEAR(klm, detail::power_phi(1e-6, x), 1e-5 * std::max(1.0, klm));
  }
}

TEST(Divergence, FiniteDifferences) {
  const double h = 1e-5;
  for (double g : {0.0, 1.0, -1.0, 2.0, 0.5, 1.7}) {
    const Divergence d(g);
    for (double x : log_grid(-1, 1, 15)) {
      const double fd1 = (d.phi(x + h) - d.phi(x - h)) / (2 * h);
      const double fd2 = (d.phi_prime(x + h) - d.phi_prime(x - h)) / (2 * h);
      EXPECT_NEAR(d.phi_prime(x), fd1, 1e-7 * std::max(1.0, std::abs(fd1)));
      EXPECT_NEAR(d.phi_second(x), fd2, 1e-6 * std::max(1.0, std::abs(fd2)));
    }
  }
}

TEST(Divergence, LogKernels) {
  for (double g : {0.0, 1.0, -1.0, 2.0, 0.5, 3.0}) {
    const Divergence d(g);
    for (double e : {-4.0, -1.0, -1e-9, 0.0, 1e-9, 0.3, 2.5}) {
      const double h = std::exp(e);
      EXPECT_NEAR(d.f_of_log(e), d.phi_prime(h), 1e-12 * std::max(1.0, std::abs(d.phi_prime(h))));
      EXPECT_NEAR(d.g_of_log(e), d.conj_of_prime(h),
                  1e-12 * std::max(1.0, std::abs(d.conj_of_prime(h))));
    }
    EXPECT_EQ(d.f_of_log(0.0), 0.0);
    EXPECT_EQ(d.g_of_log(0.0), 0.0);
  }
}

TEST(Divergence, ConjugateDomain) {
  EXPECT_THROW(Divergence(0.5).phi_conj(2.0), DomainError);
  EXPECT_THROW(Divergence(0.0).phi_conj(1.0), DomainError);
  EXPECT_THROW(Divergence(-1.0).phi_conj(0.6), DomainError);
  EXPECT_NEAR(Divergence(-1.0).phi_conj(0.5), 1.0, 1e-15);  // closed end, sup not attained
  EXPECT_NO_THROW(Divergence(1.0).phi_conj(50.0));
  try {
    Divergence(0.5).phi_conj(3.0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_EQ(e.value(), 3.0);
    EXPECT_FALSE(e.interval().empty());
  }
}

TEST(Divergence, NamesAndRejectedIndices) {
  EXPECT_EQ(Divergence::from_name("KL").kind(), DivergenceKind::KL);
  EXPECT_EQ(Divergence::from_name("klm").gamma(), 0.0);
  EXPECT_EQ(Divergence::from_name("chisq").gamma(), 2.0);
  EXPECT_EQ(Divergence::from_name("chisqm").gamma(), -1.0);
  EXPECT_EQ(Divergence::from_name("hellinger").gamma(), 0.5);
  EXPECT_EQ(Divergence::from_name("1.5").kind(), DivergenceKind::Power);
  EXPECT_THROW(Divergence::from_name("nope"), Error);
  EXPECT_THROW(Divergence(1e-9), DomainError);
  EXPECT_THROW(Divergence(1.0 - 1e-9), DomainError);
  EXPECT_NO_THROW(Divergence(1e-7));
}

}  // namespace
}  // namespace phimi
