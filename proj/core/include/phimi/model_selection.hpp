#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "phimi/divergence.hpp"
#include "phimi/ratio_model.hpp"
#include "phimi/sample.hpp"

namespace phimi {

struct CvCandidate {
  std::string name;
  ModelSpec spec;
};

struct CvConfig {
  std::size_t k = 5;
  std::vector<CvCandidate> candidates;
  Divergence divergence = Divergence::kl();
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct CvFold {
  ParamVector theta;
  /// Dual objective of the held-out fold at theta.
  double held_out = 0.0;
  bool converged = false;
};

struct CvReport {
  std::vector<std::string> names;
  /// Mean held-out objective per candidate; -inf when disqualified.
  std::vector<double> scores;
  std::vector<bool> qualified;
  std::vector<std::size_t> dimensions;
  /// folds[candidate][fold]
  std::vector<std::vector<CvFold>> folds;
  std::size_t selected = 0;
};

/// Seeded shuffle of 0..n-1 cut into k folds of size floor(n/k) or
/// ceil(n/k); indices within a fold are sorted.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k,
                                                 std::uint64_t seed);

/// k-fold cross-validation: each candidate is fitted on every training
/// complement and scored by the dual objective of the held-out fold (both
/// sums over held-out pairs, diagonal included). A candidate with a
/// non-converged or infeasible fold is disqualified. The maximal score wins;
/// ties go to the smaller parameter dimension, then the earlier candidate.
/// Throws ConfigError unless k >= 2 and n >= 2k, and when every candidate is
/// disqualified.
CvReport cross_validate(const PairedSample& sample, const CvConfig& cfg);

}  // namespace phimi
