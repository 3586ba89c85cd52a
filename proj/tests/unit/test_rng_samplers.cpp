#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "phimi/correlation_tests.hpp"
#include "phimi/distributions.hpp"
#include "phimi/error.hpp"
#include "phimi/rng.hpp"
#include "phimi/samplers.hpp"

namespace phimi {
namespace {

TEST(Rng, Reproducible) {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.uniform(), b.uniform());
    EXPECT_EQ(a.normal(), b.normal());
    EXPECT_EQ(a.index(13), b.index(13));
  }
}

TEST(Rng, StreamsAndPurposesDiffer) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t r = 0; r < 1000; ++r) seeds.insert(stream_seed(5, r));
  EXPECT_EQ(seeds.size(), 1000u);
  EXPECT_NE(derive_seed(5, 1), derive_seed(5, 2));
  EXPECT_NE(derive_seed(5, 1, 0), derive_seed(5, 1, 1));
  EXPECT_NE(Rng::stream(5, 0).uniform(), Rng::stream(5, 1).uniform());
}

TEST(Rng, UniformOpenIntervalAndMoments) {
  Rng rng(11);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
  sum = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.015);
}

TEST(Rng, IndexCoversRange) {
  Rng rng(3);
  std::map<std::size_t, int> hits;
  for (int i = 0; i < 7000; ++i) ++hits[rng.index(7)];
  EXPECT_EQ(hits.size(), 7u);
  for (auto [k, c] : hits) EXPECT_NEAR(c, 1000, 150) << k;
}

TEST(FiniteSampler, IndependentCellFrequencies) {
  const std::size_t k = 3, n = 100000;
  const PairedSample s = sample_finite({k, 0.0}, n, 21);
  std::map<std::pair<std::string, std::string>, double> cells;
  for (std::size_t i = 0; i < n; ++i) cells[{s.x_tokens()[i], s.y_tokens()[i]}] += 1;
  ASSERT_EQ(cells.size(), k * k);
  double chi2 = 0;
  const double expected = static_cast<double>(n) / (k * k);
  for (auto& [cell, c] : cells) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, chisq_quantile(0.999, k * k - 1.0));
}

TEST(FiniteSampler, FullMixtureIsDiagonal) {
  const PairedSample s = sample_finite({4, 1.0}, 500, 2);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s.x_tokens()[i], s.y_tokens()[i]);
}

TEST(FiniteSampler, DiagonalMass) {
  const PairedSample s = sample_finite({2, 0.5}, 100000, 4);
  double same = 0;
  for (std::size_t i = 0; i < s.size(); ++i) same += s.x_tokens()[i] == s.y_tokens()[i];
  EXPECT_NEAR(same / s.size(), 0.5 / 2 + 0.5, 0.005);
}

TEST(GaussianSampler, Correlation) {
  EXPECT_NEAR(pearson_r(sample_gaussian({0.5}, 100000, 8)), 0.5, 0.01);
  EXPECT_NEAR(pearson_r(sample_gaussian({0.0}, 10000, 9)), 0.0, 0.03);
  EXPECT_GT(pearson_r(sample_gaussian({1.0 - 1e-9}, 1000, 10)), 0.999999);
  const PairedSample s = sample_gaussian({0.2, 3.0}, 100000, 12);
  double sq = 0;
  for (double v : s.y()) sq += v * v;
  EXPECT_NEAR(std::sqrt(sq / s.size()), 3.0, 0.05);
}

TEST(FgmSampler, UniformMargins) {
  for (double th : {-1.0, 0.5, 1.0}) {
    const PairedSample s = sample_fgm({th}, 100000, 13);
    auto uniform_cdf = [](double v) { return std::clamp(v, 0.0, 1.0); };
    EXPECT_LT(ks_distance(s.x(), uniform_cdf), 0.0065);
    EXPECT_LT(ks_distance(s.y(), uniform_cdf), 0.0065);
  }
}

TEST(FgmSampler, IndependentAtZero) {
  Rng a(17), b(17);
  const PairedSample s = sample_fgm({0.0}, 50, a);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_DOUBLE_EQ(s.x()[i], b.uniform());
    EXPECT_NEAR(s.y()[i], b.uniform(), 1e-15);
  }
}

TEST(FgmSampler, SpearmanRhoIsThetaOverThree) {
  EXPECT_NEAR(spearman_rho(sample_fgm({1.0}, 200000, 19)), 1.0 / 3.0, 0.01);
  EXPECT_NEAR(spearman_rho(sample_fgm({-0.6}, 200000, 20)), -0.2, 0.01);
}

TEST(FgmSampler, ConditionalInverseSolvesQuadratic) {
  for (double th : {-1.0, -0.3, 0.0, 0.7, 1.0}) {
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const double u = i / 20.0, w = j / 20.0;
        const double v = fgm_conditional_inverse(th, u, w);
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
        const double a = th * (1 - 2 * u);
        EXPECT_NEAR(v * (1 + a * (1 - v)), w, 1e-14);
      }
    }
  }
}

TEST(Samplers, SeedOverloadsMatchRngOverloads) {
  Rng rng(99);
  const PairedSample a = sample_gaussian({0.3}, 20, rng);
  const PairedSample b = sample_gaussian({0.3}, 20, 99);
  EXPECT_EQ(a.x(), b.x());
  EXPECT_EQ(a.y(), b.y());
}

}  // namespace
}  // namespace phimi
