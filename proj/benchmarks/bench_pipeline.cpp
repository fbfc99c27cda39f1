#include <benchmark/benchmark.h>

#include "segtrial/builtin.hpp"
#include "segtrial/simulator.hpp"
#include "segtrial/validation.hpp"

using namespace segtrial;

namespace {

SimConfig bench_config(std::int64_t n_per_arm) {
  SimConfig config;
  config.n_control = n_per_arm;
  config.n_treatment = n_per_arm;
  config.true_prior_control = 0.153;
  config.true_prior_treatment = 0.077;
  config.model = irma2::segmental_model();
  config.eligibility = Range{20.0, 200.0};
  config.threshold = 80.0;
  config.seed = 1;
  return config;
}

}  // namespace

static void BM_PosteriorCurve(benchmark::State& state) {
  const auto model = irma2::pooled_model();
  const auto prior = estimate_prior(10, 124, 0.4755283648498331, "placebo",
                                    prior_method::count_based);
  const Grid grid{20.0, 200.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(posterior_curve(model, prior, grid));
}
BENCHMARK(BM_PosteriorCurve);

static void BM_GenerateTrial(benchmark::State& state) {
  const auto config = bench_config(state.range(0));
  std::uint64_t replicate = 0;
  for (auto _ : state) benchmark::DoNotOptimize(generate_trial(config, replicate++));
  state.SetItemsProcessed(state.iterations() * 2 * state.range(0));
}
BENCHMARK(BM_GenerateTrial)->Arg(1000)->Arg(10000);

static void BM_BootstrapPriorCi(benchmark::State& state) {
  const auto d = builtin_irma2();
  const Grouping placebo{"placebo", {Arm{irma2::placebo_label}}};
  BootstrapSpec spec{static_cast<std::int64_t>(state.range(0)), 0.95, 3};
  for (auto _ : state)
    benchmark::DoNotOptimize(bootstrap_prior_ci(d, irma2::segment_rule(),
                                                irma2::segmental_likelihoods(),
                                                prior_method::count_based, placebo, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BootstrapPriorCi)->Arg(1000)->Arg(4000);

static void BM_RunComparison(benchmark::State& state) {
  auto config = bench_config(2000);
  config.replicates = 10;
  for (auto _ : state) benchmark::DoNotOptimize(run_comparison(config));
}
BENCHMARK(BM_RunComparison);

BENCHMARK_MAIN();
