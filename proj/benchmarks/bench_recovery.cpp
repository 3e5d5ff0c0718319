#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "fragile/jpeg.hpp"
#include "fragile/recovery.hpp"

using namespace fragile;

// Arguments: JPEG quality, 1 for the high band (H_1) or 0 for the low band (L_1).
static void BM_RecoverBlock(benchmark::State& state) {
  const ImagePlane img = bench::textured_capture(64, 9);
  const DctPlane dq = jpeg_compress(img, quant_table_for_quality(static_cast<int>(state.range(0))));
  const SubbandMask scope = state.range(1) ? build_mask(1) : build_low_mask(1);
  const RecoveryProblem p = make_recovery_problem(dq, scope, 3, 3);
  std::size_t iterations = 0;
  for (auto _ : state) {
    const RecoveryResult r = recover_block(p);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r);
  }
  state.counters["free"] = static_cast<double>(p.free_count());
  state.counters["pivots"] = static_cast<double>(iterations);
}
BENCHMARK(BM_RecoverBlock)->Args({100, 1})->Args({95, 1})->Args({90, 1})->Args({90, 0})->Unit(benchmark::kMillisecond);

static void BM_RecoverBlockDense(benchmark::State& state) {
  const ImagePlane img = bench::textured_capture(64, 9);
  const DctPlane dq = jpeg_compress(img, quant_table_for_quality(100));
  const RecoveryProblem p = make_recovery_problem(dq, build_mask(1), 0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(recover_block(p, RecoverySolver::dense));
  state.counters["free"] = static_cast<double>(p.free_count());
}
BENCHMARK(BM_RecoverBlockDense)->Unit(benchmark::kMillisecond);
