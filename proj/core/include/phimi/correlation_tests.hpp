#pragma once

#include "phimi/sample.hpp"
#include "phimi/test_result.hpp"

namespace phimi {

/// Sample correlation coefficients. Throw DegenerateInput for constant data.
double pearson_r(const PairedSample& sample);
double spearman_rho(const PairedSample& sample);
/// Kendall tau-b by Knight's O(n log n) merge count, ties corrected.
double kendall_tau(const PairedSample& sample);

/// Two-sided t test of r = 0 with n - 2 df; statistic |t|.
TestResult pearson_test(const PairedSample& sample, double alpha);
/// The Pearson test applied to mid-ranks.
TestResult spearman_test(const PairedSample& sample, double alpha);
/// Normal approximation z = 3 tau sqrt(n (n - 1)) / sqrt(2 (2n + 5)).
TestResult kendall_test(const PairedSample& sample, double alpha);

}  // namespace phimi
