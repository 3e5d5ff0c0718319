#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "fragile/dct.hpp"
#include "fragile/jpeg.hpp"
#include "fragile/mask.hpp"

using namespace fragile;

static void BM_Dct8(benchmark::State& state) {
  Block8 b;
  for (std::size_t i = 0; i < 64; ++i) b[i] = static_cast<double>(i % 13);
  for (auto _ : state) {
    b = idct8(dct8(b));
    benchmark::DoNotOptimize(b);
  }
}
BENCHMARK(BM_Dct8);

static void BM_BlockDct(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ImagePlane img = bench::textured_capture(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(block_dct(img));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_BlockDct)->Arg(256)->Arg(512);

static void BM_ApplyMask(benchmark::State& state) {
  const ImagePlane img = bench::textured_capture(512, 2);
  const SubbandMask m = build_mask(1);
  for (auto _ : state) benchmark::DoNotOptimize(apply_mask(img, m));
}
BENCHMARK(BM_ApplyMask);

static void BM_JpegRoundtrip(benchmark::State& state) {
  const ImagePlane img = bench::textured_capture(512, 3);
  const int quality = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(jpeg_roundtrip(img, quality));
}
BENCHMARK(BM_JpegRoundtrip)->Arg(100)->Arg(90);
