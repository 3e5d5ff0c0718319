#pragma once

#include <span>
#include <vector>

#include "fragile/fingerprint.hpp"

namespace fragile {

// Observed residual correlation nu = ncc(W_I, W_J') and the predictor feature
// f = ncc(W_I, I * K) ncc(W_J', J' * K) for one of Alice's images I.
struct TrianglePoint {
  double feature = 0.0;
  double response = 0.0;
};

// Precomputed side of the forged image J'.
struct ForgedView {
  ImagePlane residual;   // W_J'
  double fp_corr = 0.0;  // ncc(W_J', J' * K)
};

// Precomputed side of one of Alice's images.
struct AliceView {
  ImagePlane residual;   // W_I
  double fp_corr = 0.0;  // ncc(W_I, I * K)
};

ForgedView forged_view(const ImagePlane& attacked, const ImagePlane& fp_alice,
                       double sigma0 = kDefaultDenoiseSigma);
AliceView alice_view(const ImagePlane& image, const ImagePlane& fp_alice,
                     double sigma0 = kDefaultDenoiseSigma);
TrianglePoint triangle_point(const AliceView& image, const ForgedView& forged);

struct TriangleModel {
  double theta = 0.0;  // slope
  double mu = 0.0;     // intercept
  double t = 0.0;      // decision threshold on nu - theta f - mu
  std::size_t fitted_on = 0;
  double residual_sd = 0.0;
};

inline constexpr double kDefaultFalseAlarm = 1e-3;

// Upper-tail standard normal quantile: P(Z > z) = p.
double normal_upper_quantile(double p);

// Least-squares fit of response on feature over safe images; t is the
// residual mean plus the Gaussian upper quantile at `false_alarm` times the
// residual standard deviation.
TriangleModel fit_triangle(std::span<const TrianglePoint> safe, double false_alarm = kDefaultFalseAlarm);

TriangleModel correlation_predictor_fit(std::span<const ImagePlane> safe_images,
                                        const ImagePlane& fp_alice, const ImagePlane& attacked,
                                        double false_alarm = kDefaultFalseAlarm,
                                        double sigma0 = kDefaultDenoiseSigma);

struct TriangleDecision {
  double statistic = 0.0;
  bool flagged = false;
};

TriangleDecision triangle_decide(const TrianglePoint& point, const TriangleModel& model);
TriangleDecision triangle_test(const ImagePlane& image, const ImagePlane& attacked,
                               const ImagePlane& fp_alice, const TriangleModel& model,
                               double sigma0 = kDefaultDenoiseSigma);

}  // namespace fragile
