#include <benchmark/benchmark.h>

#include "phimi/correlation_tests.hpp"
#include "phimi/estimator.hpp"
#include "phimi/objective.hpp"
#include "phimi/samplers.hpp"
#include "phimi/testing.hpp"

namespace {

using namespace phimi;

void BM_ObjectiveGaussian(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ObjectiveContext ctx(Divergence::kl(), gaussian_model(), sample_gaussian({0.3}, n, 1));
  ParamVector theta(4);
  theta << 0.05, -0.02, -0.02, 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(ctx.evaluate(theta));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ObjectiveGaussian)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_ObjectiveHellinger(benchmark::State& state) {
  const ObjectiveContext ctx(Divergence::hellinger(), gaussian_model(),
                             sample_gaussian({0.3}, 500, 2));
  ParamVector theta(4);
  theta << 0.05, -0.02, -0.02, 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(ctx.evaluate(theta));
}
BENCHMARK(BM_ObjectiveHellinger);

void BM_ObjectiveFgm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ObjectiveContext ctx(Divergence::kl(), RatioModel::copula_fgm(), sample_fgm({0.5}, n, 3));
  ParamVector theta(1);
  theta << 0.4;
  for (auto _ : state) benchmark::DoNotOptimize(ctx.evaluate(theta));
}
BENCHMARK(BM_ObjectiveFgm)->Arg(50)->Arg(500);

void BM_ObjectiveFinite(benchmark::State& state) {
  const ObjectiveContext ctx(Divergence::kl(), RatioModel::finite_discrete(Levels::numbered(4, 4)),
                             sample_finite({4, 0.3}, 1000, 4));
  const ParamVector theta = ParamVector::Constant(16, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(ctx.evaluate(theta));
}
BENCHMARK(BM_ObjectiveFinite);

void BM_EstimateGaussian(benchmark::State& state) {
  const ObjectiveContext ctx(Divergence::kl(), gaussian_model(),
                             sample_gaussian({0.3}, static_cast<std::size_t>(state.range(0)), 5));
  for (auto _ : state) benchmark::DoNotOptimize(estimate(ctx));
}
BENCHMARK(BM_EstimateGaussian)->Arg(100)->Arg(500);

void BM_KendallTau(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const PairedSample s = sample_gaussian({0.3}, n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(10)->Range(100, 100000)->Complexity(benchmark::oNLogN);

void BM_BootstrapFgm(benchmark::State& state) {
  const ObjectiveContext ctx(Divergence::kl(), RatioModel::copula_fgm(), sample_fgm({0.0}, 50, 7));
  BootstrapConfig cfg;
  cfg.b_reps = 200;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_critical(ctx, cfg));
}
BENCHMARK(BM_BootstrapFgm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
