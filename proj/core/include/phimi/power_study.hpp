#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phimi/ratio_model.hpp"
#include "phimi/rng.hpp"
#include "phimi/sample.hpp"
#include "phimi/test_result.hpp"

namespace phimi {

enum class StudyFamily { Finite, Gaussian, Fgm };

std::string_view study_family_name(StudyFamily family);
StudyFamily parse_study_family(std::string_view name);

struct PowerStudyConfig {
  StudyFamily family = StudyFamily::Finite;
  /// Category count of the finite mixture.
  std::size_t k = 2;
  /// theta for the finite and FGM families, rho for the Gaussian one.
  std::vector<double> grid;
  std::size_t n = 30;
  std::size_t reps = 10000;
  double alpha = 0.05;
  /// Divergence names (kl, chisq, hellinger, klm, chisqm or a gamma) and
  /// baselines (pearson, spearman, kendall).
  std::vector<std::string> tests{"kl", "chisq"};
  /// Calibration of the divergence tests; unset picks chisq for the finite
  /// family, ztz for KL on the Gaussian family and bootstrap otherwise.
  std::optional<Route> route;
  /// Ratio model of the divergence tests; unset uses the family's natural
  /// model (saturated finite, Gaussian d = 3 basis, FGM copula).
  std::optional<ModelSpec> model;
  std::uint64_t seed = 0;
  std::size_t b_reps = 1000;
  std::size_t ztz_draws = 10000;
  std::size_t moment_draws = 1'000'000;
  std::size_t threads = 0;
  /// Largest tolerated fraction of failed replicates per table cell.
  double max_error_rate = 0.02;
};

struct PowerRow {
  std::string test;
  double param = 0.0;
  double power = 0.0;
  double se = 0.0;
  std::size_t reps = 0;
  std::size_t n = 0;
  double alpha = 0.0;
  std::size_t rejections = 0;

  bool operator==(const PowerRow&) const = default;
};

struct CriticalValue {
  std::string test;
  Route route = Route::ChiSqExact;
  double value = 0.0;
};

struct PowerTable {
  /// Ordered by test (configuration order), then grid value.
  std::vector<PowerRow> rows;
  /// Per-study critical values of the divergence tests.
  std::vector<CriticalValue> critical_values;

  const PowerRow* find(std::string_view test, double param) const;
};

/// Draws one sample of the family at grid value `param`.
PairedSample draw_study_sample(const PowerStudyConfig& cfg, double param, Rng& rng);

/// Rejection frequencies over cfg.reps samples per grid value. Every test
/// sees the same samples. Replicate r of grid cell g uses its own random
/// stream, so the table does not depend on the worker count. Critical values
/// are computed once per study; the bootstrap route resamples one pilot
/// sample drawn at the independence member of the family. A replicate whose
/// estimate fails is left out; more than max_error_rate of failures in a cell
/// throws Error.
PowerTable run_power_study(const PowerStudyConfig& cfg);

/// "phimi-format=1", then test,param,power,se,reps,n,alpha,rejections with
/// power and se to 4 decimals.
void write_power_csv(const PowerTable& table, std::ostream& out);
/// Human-readable report: study settings, critical values, one block per test.
void write_power_report(const PowerTable& table, const PowerStudyConfig& cfg,
                        std::ostream& out);
/// Long-format plot data: series,x,y,y_low,y_high with a 2 SE band.
void write_power_long(const PowerTable& table, std::ostream& out);

/// Inverse of write_power_csv; power and se are recomputed from
/// rejections / reps. Throws ParseError.
PowerTable read_power_csv(std::istream& in);

/// Shortest representation that reads back to the same double.
std::string format_shortest(double value);
/// Fixed-point with the given number of decimals.
std::string format_fixed(double value, int decimals);

}  // namespace phimi
