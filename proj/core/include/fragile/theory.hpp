#pragma once

#include <array>
#include <bitset>
#include <span>
#include <vector>

#include "fragile/jpeg.hpp"
#include "fragile/mask.hpp"
#include "fragile/plane.hpp"

namespace fragile {

// Correlation of the retained AC coefficients, sum(U V) / sqrt(sum U^2 sum V^2).
// With DC excluded this equals the spatial Pearson correlation of the masked
// planes, because every masked block then has zero mean.
double dct_domain_correlation(const DctPlane& u, const DctPlane& v, const SubbandMask& mask);
double dct_domain_correlation(const ImagePlane& u, const ImagePlane& v, const SubbandMask& mask);

// Laplace scale in the characteristic-function convention
// Phi(x) = lambda^2 / (x^2 + lambda^2): density (lambda / 2) exp(-lambda |x|),
// variance 2 / lambda^2, lambda = 1 / b for the usual scale b.
struct LaplaceFit {
  double lambda = 0.0;
  bool degenerate = false;  // every sample was zero
};

// Maximum likelihood fit with the location fixed at zero: b = mean |x|.
LaplaceFit laplace_fit(std::span<const double> samples);

struct QuantMoments {
  double var_u = 0.0;     // Var(U)
  double var_plus = 0.0;  // Var(V)
  double cov_plus = 0.0;  // Cov(U, V)
  std::size_t terms = 0;  // series terms used
};

inline constexpr std::size_t kMaxSeriesTerms = 1'000'000;
// Mean absolute coefficient below which a subband counts as empty.
inline constexpr double kDegenerateScale = 1e-9;

// Moments of a zero-mean Laplace variable U and its quantized version
// V = floor(U / q + 0.5) q from the characteristic-function series. Terms are
// summed in consecutive pairs until k times the last pair, which bounds the
// remaining tail, falls below tol Var(U) past the point 2 pi k / q > lambda.
// Sums are compensated, so the result is accurate to about tol Var(U) in
// absolute terms; when q is many scales wide the exact moments fall below it.
QuantMoments quant_moments(double lambda, double q, double tol = 1e-12);

// Per-image, per-subband Laplace fits of AC DCT coefficients.
struct LaplaceSubbandModel {
  // lambdas[i][s] for image i and subband s = u * 8 + v; 0 where degenerate.
  std::vector<std::array<double, 64>> lambdas;
  std::vector<std::bitset<64>> degenerate;

  std::size_t n_images() const { return lambdas.size(); }
};

LaplaceSubbandModel fit_subband_models(std::span<const ImagePlane> images);

// Moments summed over images, per subband (index u * 8 + v). Only subbands
// retained by the mask are filled.
struct SubbandMomentSums {
  std::array<double, 64> cov{};
  std::array<double, 64> var{};
  std::array<double, 64> var_plus{};
  std::array<std::size_t, 64> dropped{};
};

SubbandMomentSums subband_moment_sums(const LaplaceSubbandModel& models, const QuantTable& table,
                                      const SubbandMask& mask = SubbandMask::all_ac(),
                                      double tol = 1e-12);

struct RhoResult {
  double rho = 0.0;
  std::size_t dropped = 0;  // degenerate (image, subband) pairs skipped
};

// Population correlation between the sums of uncompressed and compressed
// images over the subbands retained by `mask` (which must exclude DC).
RhoResult population_rho_detail(const LaplaceSubbandModel& models, const QuantTable& table,
                                const SubbandMask& mask, double tol = 1e-12);
RhoResult rho_from_sums(const SubbandMomentSums& sums, const SubbandMask& mask);
double population_rho(const LaplaceSubbandModel& models, const QuantTable& table,
                      const SubbandMask& mask, double tol = 1e-12);

// Sample correlation between the summed masked DCT coefficients of the two
// image lists.
double sample_r(std::span<const ImagePlane> uncompressed, std::span<const ImagePlane> compressed,
                const SubbandMask& mask);

// Mask used by the bound computations: H_c, or every AC subband for the full
// band.
SubbandMask theory_mask(const Cutoff& cutoff);

struct BoundReport {
  std::size_t n_images = 0;
  int quality = 0;
  Cutoff c;
  double rho = 0.0;
  double r = 0.0;
};

}  // namespace fragile
