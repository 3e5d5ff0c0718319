#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fragile/dct.hpp"
#include "fragile/error.hpp"
#include "fragile/jpeg.hpp"
#include "fragile/sensor_sim.hpp"
#include "fragile/theory.hpp"
#include "oracles.hpp"

using namespace fragile;

namespace {

std::vector<ImagePlane> laplacian_images(std::size_t n, std::size_t size, std::uint64_t seed) {
  sim::SceneSpec s;
  s.kind = sim::SceneKind::laplacian_synthetic;
  s.height = s.width = size;
  std::vector<ImagePlane> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(sim::render_scene(s, seed * 100 + i));
  return out;
}

}  // namespace

TEST(DctCorrelation, SelfCorrelationIsOne) {
  const ImagePlane u = oracle::random_plane(32, 32, 1, 10.0);
  EXPECT_NEAR(dct_domain_correlation(u, u, build_mask(1)), 1.0, 1e-12);
}

TEST(DctCorrelation, EqualsSpatialPearsonOfMaskedPlanes) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ImagePlane u = oracle::random_plane(64, 64, seed, 20.0, 120.0);
    ImagePlane v = oracle::random_plane(64, 64, seed + 500, 20.0, 90.0);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += 0.5 * u[i];
    for (int c = 1; c <= 5; ++c) {
      const SubbandMask m = build_mask(c);
      const double spatial = oracle::pearson(oracle::masked(u, m), oracle::masked(v, m));
      EXPECT_NEAR(dct_domain_correlation(u, v, m), spatial, 1e-9) << "c = " << c;
    }
  }
}

TEST(DctCorrelation, SignFlippedSubbandMatchesOracle) {
  const ImagePlane u = oracle::random_plane(32, 32, 3, 10.0);
  DctPlane y = block_dct(u);
  for (std::size_t br = 0; br < y.blocks_down(); ++br) {
    for (std::size_t bc = 0; bc < y.blocks_across(); ++bc) y(br * 8 + 7, bc * 8 + 6) *= -1.0;
  }
  const ImagePlane v = block_idct(y);
  const SubbandMask m = build_mask(1);
  const double r = dct_domain_correlation(u, v, m);
  EXPECT_LT(r, 1.0);
  EXPECT_NEAR(r, oracle::pearson(oracle::masked(u, m), oracle::masked(v, m)), 1e-9);
}

TEST(DctCorrelation, Errors) {
  const ImagePlane u = oracle::random_plane(16, 16, 4);
  EXPECT_THROW(dct_domain_correlation(u, u, SubbandMask::all()), ParameterError);
  EXPECT_THROW(dct_domain_correlation(u, ImagePlane(16, 16, 3.0), build_mask(1)), DegenerateError);
}

TEST(LaplaceFit, MeanAbsoluteDeviation) {
  const LaplaceFit f = laplace_fit(std::vector<double>{-1.0, 1.0});
  EXPECT_DOUBLE_EQ(f.lambda, 1.0);
  EXPECT_FALSE(f.degenerate);
  EXPECT_TRUE(laplace_fit(std::vector<double>{0.0, 0.0, 0.0}).degenerate);
  EXPECT_THROW(laplace_fit(std::vector<double>{1.0}), ParameterError);
}

TEST(LaplaceFit, KnownDistribution) {
  std::mt19937_64 rng(5);
  std::exponential_distribution<double> e(0.5);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> x(1'000'000);
  for (double& v : x) v = coin(rng) ? e(rng) : -e(rng);
  EXPECT_NEAR(laplace_fit(x).lambda, 0.5, 0.005);
}

TEST(QuantMoments, AgreeWithCellIntegrals) {
  for (double lambda : {0.05, 0.2, 1.0, 3.0}) {
    for (double q : {0.5, 1.0, 4.0, 16.0, 40.0}) {
      const QuantMoments m = quant_moments(lambda, q);
      const oracle::Moments o = oracle::cell_moments(lambda, q);
      const double scale = m.var_u;
      EXPECT_NEAR(m.var_u, o.var_u, 1e-12 * scale);
      EXPECT_NEAR(m.cov_plus, o.cov_plus, 1e-9 * scale) << lambda << " " << q;
      EXPECT_NEAR(m.var_plus, o.var_plus, 1e-9 * scale) << lambda << " " << q;
    }
  }
}

TEST(QuantMoments, VanishingStep) {
  const double lambda = 0.7;
  const QuantMoments m = quant_moments(lambda, 1e-6 / lambda);
  EXPECT_NEAR(m.cov_plus / m.var_u, 1.0, 1e-6);
  EXPECT_NEAR(m.var_plus / m.var_u, 1.0, 1e-6);
}

TEST(QuantMoments, MonteCarloAtModerateStep) {
  const QuantMoments m = quant_moments(1.0, 4.0);
  const oracle::Moments mc = oracle::monte_carlo_moments(1.0, 4.0, 10'000'000, 11);
  EXPECT_NEAR(m.cov_plus, mc.cov_plus, 0.005 * m.cov_plus);
  EXPECT_NEAR(m.var_plus, mc.var_plus, 0.005 * m.var_plus);
}

TEST(QuantMoments, StratifiedSimulationAtSparseTails) {
  // Only e^-8 of the mass leaves the zero cell here.
  const QuantMoments m = quant_moments(1.0, 16.0);
  const oracle::Moments st = oracle::stratified_moments(1.0, 16.0, 2'000'000, 12);
  EXPECT_NEAR(m.cov_plus, st.cov_plus, 0.005 * m.cov_plus);
  EXPECT_NEAR(m.var_plus, st.var_plus, 0.005 * m.var_plus);
}

TEST(QuantMoments, WideStepMatchesCellIntegrals) {
  // At q = 100 only about e^-50 of the mass leaves the zero cell, far below
  // what a simulation can see; the cell sums resolve it. The series is
  // accurate to about tol Var(U) absolute.
  const QuantMoments m = quant_moments(1.0, 100.0, 1e-14);
  const oracle::Moments o = oracle::cell_moments(1.0, 100.0);
  EXPECT_GE(m.cov_plus, -1e-14 * m.var_u);
  EXPECT_NEAR(m.cov_plus, o.cov_plus, 1e-14 * m.var_u);
  EXPECT_NEAR(m.var_plus, o.var_plus, 1e-14 * m.var_u);
}

TEST(QuantMoments, ConvergenceAndCauchySchwarz) {
  for (double lambda : {0.05, 0.3, 1.0, 5.0}) {
    for (double q : {1.0, 3.0, 10.0, 30.0}) {
      const double tol = 1e-10;
      const QuantMoments a = quant_moments(lambda, q, tol);
      const QuantMoments b = quant_moments(lambda, q, tol / 2.0);
      EXPECT_LT(std::abs(a.cov_plus - b.cov_plus), tol * a.var_u);
      EXPECT_LT(std::abs(a.var_plus - b.var_plus), tol * a.var_u);
      EXPECT_LE(a.cov_plus, std::sqrt(a.var_u * a.var_plus) * (1.0 + 1e-12));
    }
  }
  EXPECT_THROW(quant_moments(0.0, 1.0), ParameterError);
  EXPECT_THROW(quant_moments(1.0, -1.0), ParameterError);
}

TEST(PopulationRho, LosslessLimit) {
  LaplaceSubbandModel models;
  std::array<double, 64> lambdas;
  lambdas.fill(1e-3);  // scale 1000, unit steps are negligible
  lambdas[0] = 0.0;
  models.lambdas.assign(3, lambdas);
  models.degenerate.assign(3, std::bitset<64>{1});
  EXPECT_NEAR(population_rho(models, flat_table(), build_mask(1)), 1.0, 0.01);
}

TEST(PopulationRho, MonotoneInCutoffAndQuality) {
  const auto models = fit_subband_models(laplacian_images(20, 64, 1));
  for (int quality : {95, 85, 75}) {
    const QuantTable t = quant_table_for_quality(quality);
    for (int c = 1; c < 5; ++c) {
      EXPECT_GE(population_rho(models, t, build_mask(c)) + 1e-12,
                population_rho(models, t, build_mask(c + 1)));
    }
  }
  for (int c = 1; c <= 5; ++c) {
    double prev = 1.0;
    for (int quality : {100, 95, 90, 85, 80, 75, 70}) {
      const double rho = population_rho(models, quant_table_for_quality(quality), build_mask(c));
      EXPECT_LE(rho, prev + 1e-12);
      EXPECT_GE(rho, -1.0);
      prev = rho;
    }
  }
}

TEST(PopulationRho, SumsRouteMatchesDetail) {
  const auto models = fit_subband_models(laplacian_images(5, 64, 2));
  const QuantTable t = quant_table_for_quality(90);
  const SubbandMomentSums sums = subband_moment_sums(models, t);
  for (int c = 1; c <= 5; ++c) {
    const RhoResult a = population_rho_detail(models, t, build_mask(c));
    const RhoResult b = rho_from_sums(sums, build_mask(c));
    EXPECT_NEAR(a.rho, b.rho, 1e-12);
    EXPECT_EQ(a.dropped, b.dropped);
  }
}

TEST(PopulationRho, DegenerateSubbandsAreDropped) {
  // A flat image has no AC energy: every subband is degenerate.
  std::vector<ImagePlane> imgs = laplacian_images(2, 32, 3);
  imgs.push_back(ImagePlane(32, 32, 128.0));
  const auto models = fit_subband_models(imgs);
  EXPECT_EQ(models.degenerate[2].count(), 63u);  // every AC subband
  const RhoResult r = population_rho_detail(models, quant_table_for_quality(90), build_mask(1));
  EXPECT_EQ(r.dropped, 28u);
}

TEST(SampleR, Identities) {
  const auto imgs = laplacian_images(4, 32, 4);
  EXPECT_NEAR(sample_r(imgs, imgs, build_mask(1)), 1.0, 1e-12);
  const std::vector<ImagePlane> one{imgs[0]}, one_c{jpeg_roundtrip(imgs[0], 80)};
  EXPECT_NEAR(sample_r(one, one_c, build_mask(2)), dct_domain_correlation(imgs[0], one_c[0], build_mask(2)),
              1e-12);
  EXPECT_THROW(sample_r({}, {}, build_mask(1)), ParameterError);
}

TEST(SampleR, Quality100OnIntegerCoefficientImages) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> d(-30, 30);
  std::vector<ImagePlane> imgs, comp;
  for (int k = 0; k < 4; ++k) {
    DctPlane y(32, 32);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (i % 64 == 0) ? 0.0 : d(rng);
    ImagePlane img = block_idct(y);
    for (double& v : img.values()) v += 128.0;
    imgs.push_back(img);
    comp.push_back(jpeg_roundtrip(img, 100));
  }
  EXPECT_GT(sample_r(imgs, comp, build_mask(1)), 0.99);
}

TEST(TheoryMask, FullMeansAllAc) {
  EXPECT_EQ(theory_mask(Cutoff::full()), SubbandMask::all_ac());
  EXPECT_EQ(theory_mask(Cutoff::at(2)), build_mask(2));
}
