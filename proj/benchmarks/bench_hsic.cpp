#include <benchmark/benchmark.h>

#include <vector>

#include "fragile/hsic.hpp"
#include "fragile/random.hpp"

using namespace fragile;

namespace {

SampleMatrix normal_samples(std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed, {});
  std::vector<double> v(n);
  for (double& x : v) x = sample_normal(rng, 0.0, 1.0);
  return SampleMatrix::scalar(std::move(v));
}

}  // namespace

static void BM_HsicStatistic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SampleMatrix x = normal_samples(n, 1), y = normal_samples(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(hsic_statistic(x, y));
}
BENCHMARK(BM_HsicStatistic)->Arg(64)->Arg(256)->Arg(1024);

static void BM_HsicTest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SampleMatrix x = normal_samples(n, 3), y = normal_samples(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(hsic_test(x, y, 0.05, kDefaultPermutations, 5));
}
BENCHMARK(BM_HsicTest)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
