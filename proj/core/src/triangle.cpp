#include "fragile/triangle.hpp"

#include <cmath>
#include <numbers>

#include "fragile/parallel.hpp"
#include "fragile/similarity.hpp"

namespace fragile {

ForgedView forged_view(const ImagePlane& attacked, const ImagePlane& fp_alice, double sigma0) {
  ForgedView v;
  v.residual = noise_residual(attacked, sigma0);
  v.fp_corr = ncc(v.residual, hadamard(attacked, fp_alice));
  return v;
}

AliceView alice_view(const ImagePlane& image, const ImagePlane& fp_alice, double sigma0) {
  AliceView v;
  v.residual = noise_residual(image, sigma0);
  v.fp_corr = ncc(v.residual, hadamard(image, fp_alice));
  return v;
}

TrianglePoint triangle_point(const AliceView& image, const ForgedView& forged) {
  return {image.fp_corr * forged.fp_corr, ncc(image.residual, forged.residual)};
}

double normal_upper_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("tail probability must lie in (0, 1)");
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(mid / std::numbers::sqrt2) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TriangleModel fit_triangle(std::span<const TrianglePoint> safe, double false_alarm) {
  if (safe.size() < 2) throw ParameterError("triangle fit needs at least two safe images");
  const double n = static_cast<double>(safe.size());
  double mf = 0.0, mr = 0.0;
  for (const auto& p : safe) mf += p.feature, mr += p.response;
  mf /= n;
  mr /= n;
  double sff = 0.0, sfr = 0.0, scale = 0.0;
  for (const auto& p : safe) {
    scale += p.feature * p.feature;
    sff += (p.feature - mf) * (p.feature - mf);
    sfr += (p.feature - mf) * (p.response - mr);
  }
  // Spread at roundoff level relative to the features means no spread at all.
  if (!(sff > 1e-24 * scale) || !(sff > 1e-300)) throw DegenerateError("triangle fit is rank deficient: constant feature");
  TriangleModel m;
  m.theta = sfr / sff;
  m.mu = mr - m.theta * mf;
  m.fitted_on = safe.size();
  double rm = 0.0, rss = 0.0;
  for (const auto& p : safe) rm += p.response - m.theta * p.feature - m.mu;
  rm /= n;
  for (const auto& p : safe) {
    const double e = p.response - m.theta * p.feature - m.mu - rm;
    rss += e * e;
  }
  m.residual_sd = std::sqrt(rss / std::max(1.0, n - 2.0));
  m.t = rm + normal_upper_quantile(false_alarm) * m.residual_sd;
  return m;
}

TriangleModel correlation_predictor_fit(std::span<const ImagePlane> safe_images,
                                        const ImagePlane& fp_alice, const ImagePlane& attacked,
                                        double false_alarm, double sigma0) {
  if (safe_images.size() < 10) throw ParameterError("triangle fit needs at least 10 safe images");
  const ForgedView forged = forged_view(attacked, fp_alice, sigma0);
  std::vector<TrianglePoint> pts(safe_images.size());
  parallel_for(safe_images.size(), [&](std::size_t i) {
    pts[i] = triangle_point(alice_view(safe_images[i], fp_alice, sigma0), forged);
  });
  return fit_triangle(pts, false_alarm);
}

TriangleDecision triangle_decide(const TrianglePoint& point, const TriangleModel& model) {
  TriangleDecision d;
  d.statistic = point.response - model.theta * point.feature - model.mu;
  d.flagged = d.statistic > model.t;
  return d;
}

TriangleDecision triangle_test(const ImagePlane& image, const ImagePlane& attacked,
                               const ImagePlane& fp_alice, const TriangleModel& model,
                               double sigma0) {
  return triangle_decide(
      triangle_point(alice_view(image, fp_alice, sigma0), forged_view(attacked, fp_alice, sigma0)),
      model);
}

}  // namespace fragile
