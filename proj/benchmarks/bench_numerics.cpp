#include <benchmark/benchmark.h>

#include <cmath>

#include "segtrial/rng.hpp"
#include "segtrial/stats.hpp"
#include "segtrial/validation.hpp"

using namespace segtrial;

static void BM_NormalCdf(benchmark::State& state) {
  double z = -8.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normal_cdf(z));
    z += 0.001;
    if (z > 8.0) z = -8.0;
  }
}
BENCHMARK(BM_NormalCdf);

static void BM_NormalQuantile(benchmark::State& state) {
  double p = 0.0001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(normal_quantile(p));
    p += 0.0001;
    if (p > 0.9999) p = 0.0001;
  }
}
BENCHMARK(BM_NormalQuantile);

static void BM_TruncatedNormalDraw(benchmark::State& state) {
  RngStream rng(1);
  const TruncatedGaussian tg{3.65, 0.91, std::log(20.0), std::log(200.0)};
  for (auto _ : state) benchmark::DoNotOptimize(rng.truncated_normal(tg));
}
BENCHMARK(BM_TruncatedNormalDraw);

static void BM_ClopperPearson(benchmark::State& state) {
  std::int64_t e = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_binomial_ci(e % 196, 196, 0.95));
    ++e;
  }
}
BENCHMARK(BM_ClopperPearson);
