#include "phimi/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "phimi/error.hpp"
#include "phimi/estimator.hpp"
#include "phimi/objective.hpp"
#include "phimi/parallel.hpp"
#include "phimi/rng.hpp"

namespace phimi {

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k,
                                                 std::uint64_t seed) {
  if (k < 2 || k > n) throw ConfigError("fold count must lie in [2, n]");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t f = 0; f < k; ++f) {
    folds[f].assign(perm.begin() + static_cast<std::ptrdiff_t>(f * n / k),
                    perm.begin() + static_cast<std::ptrdiff_t>((f + 1) * n / k));
    std::sort(folds[f].begin(), folds[f].end());
  }
  return folds;
}

CvReport cross_validate(const PairedSample& sample, const CvConfig& cfg) {
  const std::size_t n = sample.size();
  if (cfg.k < 2 || n < 2 * cfg.k) throw ConfigError("cross-validation needs k >= 2 and n >= 2k");
  if (cfg.candidates.empty()) throw ConfigError("cross-validation needs a candidate model");

  const auto folds = make_folds(n, cfg.k, cfg.seed);
  std::vector<std::vector<std::size_t>> train(cfg.k);
  for (std::size_t f = 0; f < cfg.k; ++f) {
    std::vector<char> held(n, 0);
    for (std::size_t i : folds[f]) held[i] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!held[i]) train[f].push_back(i);
    }
  }

  const std::size_t nc = cfg.candidates.size();
  std::vector<ObjectiveContext> full;
  full.reserve(nc);
  CvReport rep;
  for (const auto& c : cfg.candidates) {
    full.emplace_back(cfg.divergence, c.spec.build(sample), sample);
    rep.names.push_back(c.name);
    rep.dimensions.push_back(full.back().model().dimension());
  }
  rep.folds.assign(nc, std::vector<CvFold>(cfg.k));

  parallel_for(nc * cfg.k, cfg.threads, [&](std::size_t job) {
    const std::size_t c = job / cfg.k, f = job % cfg.k;
    const DualEstimate est = estimate(full[c].subset(train[f]));
    CvFold& out = rep.folds[c][f];
    out.theta = est.theta_hat;
    out.converged = est.converged;
    const ObjectiveValue v = full[c].subset(folds[f]).evaluate(est.theta_hat, false);
    out.held_out = v.feasible ? v.value : -std::numeric_limits<double>::infinity();
  });

  bool any = false;
  for (std::size_t c = 0; c < nc; ++c) {
    bool ok = true;
    double sum = 0.0;
    for (const CvFold& f : rep.folds[c]) {
      ok = ok && f.converged && std::isfinite(f.held_out);
      sum += f.held_out;
    }
    rep.qualified.push_back(ok);
    rep.scores.push_back(ok ? sum / static_cast<double>(cfg.k)
                            : -std::numeric_limits<double>::infinity());
    if (!ok) continue;
    const bool better =
        !any || rep.scores[c] > rep.scores[rep.selected] ||
        (rep.scores[c] == rep.scores[rep.selected] &&
         rep.dimensions[c] < rep.dimensions[rep.selected]);
    if (better) rep.selected = c;
    any = true;
  }
  if (!any) throw ConfigError("every candidate model was disqualified");
  return rep;
}

}  // namespace phimi
