#include <benchmark/benchmark.h>

#include "fragile/jpeg.hpp"
#include "fragile/mask.hpp"
#include "fragile/sensor_sim.hpp"
#include "fragile/theory.hpp"

using namespace fragile;

// Arguments: 1 / lambda and q. Wide steps need the most terms.
static void BM_QuantMoments(benchmark::State& state) {
  const double lambda = 1.0 / static_cast<double>(state.range(0));
  const double q = static_cast<double>(state.range(1));
  std::size_t terms = 0;
  for (auto _ : state) {
    const QuantMoments m = quant_moments(lambda, q);
    terms = m.terms;
    benchmark::DoNotOptimize(m);
  }
  state.counters["terms"] = static_cast<double>(terms);
}
BENCHMARK(BM_QuantMoments)->Args({1, 4})->Args({5, 16})->Args({1, 40})->Args({20, 100});

static void BM_PopulationRho(benchmark::State& state) {
  sim::SceneSpec s;
  s.kind = sim::SceneKind::laplacian_synthetic;
  s.height = s.width = 128;
  std::vector<ImagePlane> imgs;
  for (std::uint64_t i = 0; i < 50; ++i) imgs.push_back(sim::render_scene(s, i));
  const auto models = fit_subband_models(imgs);
  const QuantTable t = quant_table_for_quality(80);
  for (auto _ : state) benchmark::DoNotOptimize(population_rho(models, t, build_mask(1)));
}
BENCHMARK(BM_PopulationRho)->Unit(benchmark::kMillisecond);
