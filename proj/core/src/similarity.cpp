#include "fragile/similarity.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>

namespace fragile {

namespace {

// Planner calls are not thread-safe in FFTW; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwFree>(p);
}

// Circular cross-correlation rho(s) = sum_x a(x) b(x + s) of zero-mean inputs.
std::vector<double> cross_correlation(const std::vector<double>& a, const std::vector<double>& b,
                                      std::size_t h, std::size_t w) {
  const std::size_t n = h * w;
  const std::size_t nc = h * (w / 2 + 1);
  auto real = fftw_buffer<double>(n);
  auto fa = fftw_buffer<fftw_complex>(nc);
  auto fb = fftw_buffer<fftw_complex>(nc);

  fftw_plan forward, backward;
  {
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft_r2c_2d(static_cast<int>(h), static_cast<int>(w), real.get(), fa.get(),
                                   FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_2d(static_cast<int>(h), static_cast<int>(w), fa.get(), real.get(),
                                    FFTW_ESTIMATE);
  }
  std::copy(a.begin(), a.end(), real.get());
  fftw_execute_dft_r2c(forward, real.get(), fa.get());
  std::copy(b.begin(), b.end(), real.get());
  fftw_execute_dft_r2c(forward, real.get(), fb.get());
  // conj(A) * B gives sum_x a(x) b(x + s).
  for (std::size_t i = 0; i < nc; ++i) {
    const double re = fa[i][0] * fb[i][0] + fa[i][1] * fb[i][1];
    const double im = fa[i][0] * fb[i][1] - fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  fftw_execute_dft_c2r(backward, fa.get(), real.get());
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  std::vector<double> out(real.get(), real.get() + n);
  for (double& v : out) v /= static_cast<double>(n);
  return out;
}

std::vector<double> centered(const ImagePlane& p, double& norm) {
  const double m = mean(p.values());
  std::vector<double> out(p.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = p[i] - m;
    ss += out[i] * out[i];
  }
  norm = std::sqrt(ss);
  return out;
}

}  // namespace

const char* to_string(Measure m) { return m == Measure::ncc ? "ncc" : "pce"; }

double ncc(const ImagePlane& a, const ImagePlane& b) {
  require_same_shape(a, b, "ncc");
  const double ma = mean(a.values()), mb = mean(b.values());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateError("correlation of a constant plane is undefined");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double pce(const ImagePlane& residual, const ImagePlane& templ) {
  require_same_shape(residual, templ, "pce");
  double na = 0.0, nb = 0.0;
  const auto a = centered(residual, na);
  const auto b = centered(templ, nb);
  if (na == 0.0 || nb == 0.0) throw DegenerateError("pce of a constant plane is undefined");
  const std::size_t h = residual.height(), w = residual.width();
  auto rho = cross_correlation(a, b, h, w);
  for (double& v : rho) v /= na * nb;

  const std::size_t half = kPceExclusion / 2;
  auto near_zero = [half](std::size_t i, std::size_t n) { return i <= half || i >= n - half; };
  double energy = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (near_zero(r, h) && near_zero(c, w)) continue;
      energy += rho[r * w + c] * rho[r * w + c];
      ++count;
    }
  }
  if (count == 0 || energy == 0.0) throw DegenerateError("pce energy term is zero");
  const double peak = rho[0];
  return peak * std::abs(peak) / (energy / static_cast<double>(count));
}

double similarity(const ImagePlane& a, const ImagePlane& b, Measure measure) {
  return measure == Measure::ncc ? ncc(a, b) : pce(a, b);
}

double residual_score(const ImagePlane& residual, const ImagePlane& query, const ImagePlane& fp,
                      const std::optional<SubbandMask>& mask, Measure measure) {
  require_same_shape(residual, query, "identification");
  require_same_shape(fp, query, "identification");
  ImagePlane templ = hadamard(query, fp);
  if (!mask) return similarity(residual, templ, measure);
  return similarity(apply_mask(residual, *mask), apply_mask(templ, *mask), measure);
}

SimilarityReport identify(const ImagePlane& query, const Fingerprint& fp,
                          const std::optional<SubbandMask>& mask, Measure measure,
                          double threshold, double sigma0) {
  SimilarityReport rep;
  rep.measure = measure;
  rep.threshold = threshold;
  rep.value = residual_score(noise_residual(query, sigma0), query, fp.plane, mask, measure);
  rep.decision = rep.value > threshold;
  return rep;
}

SimilarityReport identify(const ImagePlane& query, const Fingerprint& fp, const Cutoff& cutoff,
                          Measure measure, double threshold, double sigma0) {
  std::optional<SubbandMask> mask;
  if (!cutoff.is_full()) mask = build_mask(*cutoff.c);
  SimilarityReport rep = identify(query, fp, mask, measure, threshold, sigma0);
  rep.cutoff_c = cutoff.c;
  return rep;
}

}  // namespace fragile
