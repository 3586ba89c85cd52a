#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "phimi/error.hpp"
#include "phimi/model_selection.hpp"
#include "phimi/samplers.hpp"

namespace phimi {
namespace {

CvCandidate cand(const std::string& name, const std::string& descriptor) {
  return {name, ModelSpec::parse(descriptor)};
}

TEST(Folds, PartitionWithBalancedSizes) {
  for (std::size_t n : {10u, 11u, 57u}) {
    for (std::size_t k : {2u, 3u, 5u}) {
      const auto folds = make_folds(n, k, 42);
      ASSERT_EQ(folds.size(), k);
      std::set<std::size_t> seen;
      std::size_t lo = n, hi = 0;
      for (const auto& f : folds) {
        EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
        lo = std::min(lo, f.size());
        hi = std::max(hi, f.size());
        for (std::size_t i : f) EXPECT_TRUE(seen.insert(i).second);
      }
      EXPECT_EQ(seen.size(), n);
      EXPECT_LE(hi - lo, 1u);
    }
  }
  EXPECT_EQ(make_folds(20, 4, 1), make_folds(20, 4, 1));
  EXPECT_NE(make_folds(20, 4, 1), make_folds(20, 4, 2));
  EXPECT_THROW(make_folds(5, 1, 0), ConfigError);
}

TEST(CrossValidate, SingleCandidate) {
  CvConfig cfg;
  cfg.candidates = {cand("only", "expbilinear:x,y")};
  const CvReport r = cross_validate(sample_gaussian({0.5}, 100, 1), cfg);
  EXPECT_EQ(r.selected, 0u);
  EXPECT_TRUE(r.qualified[0]);
  EXPECT_EQ(r.folds[0].size(), 5u);
  EXPECT_TRUE(std::isfinite(r.scores[0]));
}

TEST(CrossValidate, Preconditions) {
  CvConfig cfg;
  cfg.candidates = {cand("a", "expbilinear:x,y")};
  cfg.k = 5;
  EXPECT_THROW(cross_validate(sample_gaussian({0}, 9, 1), cfg), ConfigError);
  cfg.candidates.clear();
  EXPECT_THROW(cross_validate(sample_gaussian({0}, 50, 1), cfg), ConfigError);
}

TEST(CrossValidate, DeterministicAndThreadIndependent) {
  CvConfig cfg;
  cfg.candidates = {cand("xy", "expbilinear:x,y"), cand("gauss", "gaussian")};
  cfg.seed = 5;
  cfg.threads = 1;
  const PairedSample s = sample_gaussian({0.4}, 120, 2);
  const CvReport a = cross_validate(s, cfg);
  cfg.threads = 3;
  const CvReport b = cross_validate(s, cfg);
  EXPECT_EQ(a.scores, b.scores);
  EXPECT_EQ(a.selected, b.selected);
}

TEST(CrossValidate, ScoreIsMeanOfHeldOutFolds) {
  CvConfig cfg;
  cfg.candidates = {cand("xy", "expbilinear:x,y")};
  const CvReport r = cross_validate(sample_gaussian({0.4}, 100, 3), cfg);
  double sum = 0;
  for (const CvFold& f : r.folds[0]) sum += f.held_out;
  // fold order does not matter
  double rev = 0;
  for (auto it = r.folds[0].rbegin(); it != r.folds[0].rend(); ++it) rev += it->held_out;
  EXPECT_NEAR(r.scores[0], sum / 5, 1e-15);
  EXPECT_NEAR(sum, rev, 1e-14);
}

TEST(CrossValidate, TiesGoToSmallerDimension) {
  CvConfig cfg;
  // identical models up to an unused term: under independence the larger one
  // cannot be strictly better at every fold, and duplicates tie exactly
  cfg.candidates = {cand("big", "gaussian"), cand("small", "expbilinear:x,y"),
                    cand("small2", "expbilinear:x,y")};
  const CvReport r = cross_validate(sample_gaussian({0.6}, 100, 4), cfg);
  EXPECT_EQ(r.scores[1], r.scores[2]);
  if (r.scores[1] >= r.scores[0]) EXPECT_EQ(r.selected, 1u);
  EXPECT_EQ(r.dimensions[0], 4u);
  EXPECT_EQ(r.dimensions[1], 2u);
}

TEST(CrossValidate, SelectsTrueBasis) {
  // Gaussian data: the odd-order basis carries no dependence.
  int hits = 0;
  const int runs = 100;
  for (int r = 0; r < runs; ++r) {
    CvConfig cfg;
    cfg.candidates = {cand("noise", "expbilinear:x2,y;x,y2"), cand("true", "gaussian")};
    cfg.seed = static_cast<std::uint64_t>(r);
    const CvReport rep = cross_validate(sample_gaussian({0.5}, 500, stream_seed(99, r)), cfg);
    hits += rep.selected == 1;
  }
  EXPECT_GE(hits, 90);
}

}  // namespace
}  // namespace phimi
