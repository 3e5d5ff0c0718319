#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "fragile/denoise.hpp"
#include "fragile/fingerprint.hpp"
#include "fragile/mask.hpp"
#include "fragile/similarity.hpp"

using namespace fragile;

static void BM_Denoise(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ImagePlane img = bench::textured_capture(n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(extract_residual(img, "bench"));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_Denoise)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Pce(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ImagePlane a = bench::textured_capture(n, 5);
  const ImagePlane b = bench::textured_capture(n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(pce(a, b));
}
BENCHMARK(BM_Pce)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Ncc(benchmark::State& state) {
  const ImagePlane a = bench::textured_capture(512, 7);
  const ImagePlane b = bench::textured_capture(512, 8);
  for (auto _ : state) benchmark::DoNotOptimize(ncc(a, b));
}
BENCHMARK(BM_Ncc);
