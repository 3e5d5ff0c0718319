#include "fragile/theory.hpp"

#include <cmath>
#include <numbers>

#include "fragile/dct.hpp"
#include "fragile/error.hpp"
#include "fragile/parallel.hpp"

namespace fragile {

namespace {

void require_no_dc(const SubbandMask& mask) {
  if (mask.includes_dc()) throw ParameterError("correlation mask must exclude the DC subband");
}

// Neumaier summation.
void kahan_add(double& sum, double& comp, double x) {
  const double t = sum + x;
  comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
  sum = t;
}

}  // namespace

double dct_domain_correlation(const DctPlane& u, const DctPlane& v, const SubbandMask& mask) {
  require_same_shape(u, v, "dct-domain correlation");
  require_no_dc(mask);
  double suv = 0.0, suu = 0.0, svv = 0.0;
  for (std::size_t r = 0; r < u.height(); ++r) {
    for (std::size_t c = 0; c < u.width(); ++c) {
      if (!mask.retained((r % kBlock) * kBlock + c % kBlock)) continue;
      suv += u(r, c) * v(r, c);
      suu += u(r, c) * u(r, c);
      svv += v(r, c) * v(r, c);
    }
  }
  // Flat planes leave only DCT roundoff behind.
  const double floor = kDegenerateScale * kDegenerateScale;
  if (suu <= floor || svv <= floor) throw DegenerateError("all retained coefficients are zero");
  return suv / std::sqrt(suu * svv);
}

double dct_domain_correlation(const ImagePlane& u, const ImagePlane& v, const SubbandMask& mask) {
  require_same_shape(u, v, "dct-domain correlation");
  return dct_domain_correlation(block_dct(u), block_dct(v), mask);
}

LaplaceFit laplace_fit(std::span<const double> samples) {
  if (samples.size() < 2) throw ParameterError("laplace fit needs at least two samples");
  double s = 0.0;
  for (double x : samples) s += std::abs(x);
  // Roundoff of an exactly flat block leaves ~1e-14; treat that as no energy.
  if (s <= kDegenerateScale * static_cast<double>(samples.size())) return {0.0, true};
  return {static_cast<double>(samples.size()) / s, false};
}

QuantMoments quant_moments(double lambda, double q, double tol) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be positive");
  if (!(q > 0.0) || !std::isfinite(q)) throw ParameterError("step size must be positive");
  if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
  using std::numbers::pi;
  const double var = 2.0 / (lambda * lambda);
  const double l2 = lambda * lambda;

  // s1 = sum Phi(2 pi k / q) (-1)^k / k^2, s2 = sum Phi'(2 pi k / q) (-1)^(k+1) / k
  // Compensated sums; wide steps need tens of thousands of terms.
  double s1 = 0.0, s2 = 0.0, c1 = 0.0, c2 = 0.0;
  std::size_t k = 1;
  for (;; k += 2) {
    if (k > kMaxSeriesTerms) {
      throw NumericalError("quantization series did not converge within " +
                           std::to_string(kMaxSeriesTerms) + " terms");
    }
    double p1 = 0.0, p2 = 0.0;
    for (std::size_t j = k; j < k + 2; ++j) {
      const double kk = static_cast<double>(j);
      const double x = 2.0 * pi * kk / q;
      const double d = x * x + l2;
      const double phi = l2 / d;
      const double dphi = -2.0 * x * l2 / (d * d);
      const double sign = j % 2 == 0 ? 1.0 : -1.0;
      p1 += phi * sign / (kk * kk);
      p2 += -dphi * sign / kk;
    }
    kahan_add(s1, c1, p1);
    kahan_add(s2, c2, p2);
    const double x_next = 2.0 * pi * static_cast<double>(k + 1) / q;
    // Pairs decay at least like k^-4, so k times the last one bounds the tail.
    const double contrib = static_cast<double>(k) *
        std::max(q * q / (pi * pi) * std::abs(p1), 2.0 * q / pi * std::abs(p2));
    if (x_next > lambda && contrib < tol * var) break;
  }
  s1 += c1;
  s2 += c2;
  QuantMoments m;
  m.var_u = var;
  m.var_plus = var + q * q / 12.0 + q * q / (pi * pi) * s1 + 2.0 * q / pi * s2;
  m.cov_plus = var + q / pi * s2;
  m.terms = k + 1;
  return m;
}

LaplaceSubbandModel fit_subband_models(std::span<const ImagePlane> images) {
  LaplaceSubbandModel model;
  model.lambdas.resize(images.size());
  model.degenerate.resize(images.size());
  std::vector<double> coeffs;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const DctPlane y = block_dct(images[i]);
    model.lambdas[i].fill(0.0);
    for (std::size_t s = 1; s < 64; ++s) {
      coeffs.clear();
      for (std::size_t br = 0; br < y.blocks_down(); ++br) {
        for (std::size_t bc = 0; bc < y.blocks_across(); ++bc) {
          coeffs.push_back(y(br * kBlock + s / kBlock, bc * kBlock + s % kBlock));
        }
      }
      if (coeffs.size() < 2) {
        model.degenerate[i].set(s);
        continue;
      }
      const LaplaceFit fit = laplace_fit(coeffs);
      model.lambdas[i][s] = fit.lambda;
      model.degenerate[i].set(s, fit.degenerate);
    }
  }
  return model;
}

SubbandMomentSums subband_moment_sums(const LaplaceSubbandModel& models, const QuantTable& table,
                                      const SubbandMask& mask, double tol) {
  require_no_dc(mask);
  if (models.n_images() == 0) throw ParameterError("no subband models");
  const std::size_t n = models.n_images();
  std::vector<SubbandMomentSums> per_image(n);
  parallel_for(n, [&](std::size_t i) {
    SubbandMomentSums& out = per_image[i];
    for (std::size_t s = 1; s < 64; ++s) {
      if (!mask.retained(s)) continue;
      if (models.degenerate[i].test(s)) {
        out.dropped[s] = 1;
        continue;
      }
      const QuantMoments m = quant_moments(models.lambdas[i][s], table.q[s], tol);
      out.cov[s] = m.cov_plus;
      out.var[s] = m.var_u;
      out.var_plus[s] = m.var_plus;
    }
  });
  SubbandMomentSums total;
  for (const auto& p : per_image) {
    for (std::size_t s = 0; s < 64; ++s) {
      total.cov[s] += p.cov[s];
      total.var[s] += p.var[s];
      total.var_plus[s] += p.var_plus[s];
      total.dropped[s] += p.dropped[s];
    }
  }
  return total;
}

RhoResult rho_from_sums(const SubbandMomentSums& sums, const SubbandMask& mask) {
  require_no_dc(mask);
  if (mask.count() == 0) throw ParameterError("mask retains no subband");
  double cov = 0.0, var = 0.0, var_plus = 0.0;
  RhoResult out;
  for (std::size_t s = 1; s < 64; ++s) {
    if (!mask.retained(s)) continue;
    cov += sums.cov[s];
    var += sums.var[s];
    var_plus += sums.var_plus[s];
    out.dropped += sums.dropped[s];
  }
  if (var == 0.0 || var_plus == 0.0) throw DegenerateError("no usable subband for rho");
  out.rho = cov / (std::sqrt(var) * std::sqrt(var_plus));
  return out;
}

RhoResult population_rho_detail(const LaplaceSubbandModel& models, const QuantTable& table,
                                const SubbandMask& mask, double tol) {
  require_no_dc(mask);
  if (mask.count() == 0) throw ParameterError("mask retains no subband");
  return rho_from_sums(subband_moment_sums(models, table, mask, tol), mask);
}

double population_rho(const LaplaceSubbandModel& models, const QuantTable& table,
                      const SubbandMask& mask, double tol) {
  return population_rho_detail(models, table, mask, tol).rho;
}

double sample_r(std::span<const ImagePlane> uncompressed, std::span<const ImagePlane> compressed,
                const SubbandMask& mask) {
  if (uncompressed.empty()) throw ParameterError("sample correlation needs at least one image");
  if (uncompressed.size() != compressed.size()) {
    throw ParameterError("uncompressed and compressed lists differ in length");
  }
  ImagePlane su = uncompressed.front(), sc = compressed.front();
  require_same_shape(su, sc, "sample correlation");
  for (std::size_t i = 1; i < uncompressed.size(); ++i) {
    su = su + uncompressed[i];
    sc = sc + compressed[i];
  }
  return dct_domain_correlation(su, sc, mask);
}

SubbandMask theory_mask(const Cutoff& cutoff) {
  if (cutoff.is_full()) return SubbandMask::all_ac();
  return build_mask(*cutoff.c) & SubbandMask::all_ac();
}

}  // namespace fragile
