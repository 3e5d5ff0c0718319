#include "fragile/denoise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace fragile {

namespace {

// Daubechies, four vanishing moments (8 taps), analysis low-pass.
constexpr std::array<double, 8> kLow = {
    -0.010597401785069032, 0.0328830116668852,  0.030841381835560764, -0.18703481171909309,
    -0.027983769416859854, 0.6308807679298589,  0.7148465705529157,   0.2303778133088965,
};

constexpr std::array<double, 8> make_high() {
  std::array<double, 8> g{};
  for (std::size_t k = 0; k < 8; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * kLow[7 - k];
  return g;
}
constexpr std::array<double, 8> kHigh = make_high();

// One analysis step on a strided 1-D signal of even length n.
void analyze(double* x, std::size_t n, std::size_t stride, std::vector<double>& scratch) {
  scratch.assign(n, 0.0);
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (std::size_t k = 0; k < 8; ++k) {
      const double v = x[((2 * i + k) % n) * stride];
      a += kLow[k] * v;
      d += kHigh[k] * v;
    }
    scratch[i] = a;
    scratch[half + i] = d;
  }
  for (std::size_t i = 0; i < n; ++i) x[i * stride] = scratch[i];
}

void synthesize(double* x, std::size_t n, std::size_t stride, std::vector<double>& scratch) {
  scratch.assign(n, 0.0);
  const std::size_t half = n / 2;
  for (std::size_t i = 0; i < half; ++i) {
    const double a = x[i * stride];
    const double d = x[(half + i) * stride];
    for (std::size_t k = 0; k < 8; ++k) scratch[(2 * i + k) % n] += kLow[k] * a + kHigh[k] * d;
  }
  for (std::size_t i = 0; i < n; ++i) x[i * stride] = scratch[i];
}

// Symmetric (half-sample) extension to the requested size.
WaveletImage pad_symmetric(const ImagePlane& img, std::size_t height, std::size_t width) {
  WaveletImage out{height, width, std::vector<double>(height * width)};
  auto reflect = [](std::size_t i, std::size_t n) {
    std::size_t period = 2 * n;
    i %= period;
    return i < n ? i : period - 1 - i;
  };
  for (std::size_t r = 0; r < height; ++r) {
    const std::size_t sr = reflect(r, img.height());
    for (std::size_t c = 0; c < width; ++c) out.data[r * width + c] = img(sr, reflect(c, img.width()));
  }
  return out;
}

// Wiener attenuation of one detail subband stored at (r0, c0) with size h x w.
void wiener_subband(WaveletImage& img, std::size_t r0, std::size_t c0, std::size_t h,
                    std::size_t w, double noise_var) {
  // Integral image of squared coefficients with a zero border row/column.
  std::vector<double> integral((h + 1) * (w + 1), 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < w; ++c) {
      const double v = img.data[(r0 + r) * img.width + c0 + c];
      row += v * v;
      integral[(r + 1) * (w + 1) + c + 1] = integral[r * (w + 1) + c + 1] + row;
    }
  }
  auto window_mean = [&](std::size_t r, std::size_t c, std::size_t radius) {
    const std::size_t top = r >= radius ? r - radius : 0;
    const std::size_t left = c >= radius ? c - radius : 0;
    const std::size_t bottom = std::min(h, r + radius + 1);
    const std::size_t right = std::min(w, c + radius + 1);
    const double sum = integral[bottom * (w + 1) + right] - integral[top * (w + 1) + right] -
                       integral[bottom * (w + 1) + left] + integral[top * (w + 1) + left];
    return sum / static_cast<double>((bottom - top) * (right - left));
  };
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double est = std::numeric_limits<double>::infinity();
      for (std::size_t radius = 1; radius <= 4; ++radius) {
        est = std::min(est, std::max(0.0, window_mean(r, c, radius) - noise_var));
      }
      img.data[(r0 + r) * img.width + c0 + c] *= est / (est + noise_var);
    }
  }
}

}  // namespace

void forward_dwt(WaveletImage& img, int levels) {
  std::vector<double> scratch;
  std::size_t h = img.height, w = img.width;
  for (int l = 0; l < levels; ++l) {
    if (h % 2 || w % 2) throw ShapeError("wavelet level requires even dimensions");
    for (std::size_t r = 0; r < h; ++r) analyze(img.data.data() + r * img.width, w, 1, scratch);
    for (std::size_t c = 0; c < w; ++c) analyze(img.data.data() + c, h, img.width, scratch);
    h /= 2;
    w /= 2;
  }
}

void inverse_dwt(WaveletImage& img, int levels) {
  std::vector<double> scratch;
  for (int l = levels - 1; l >= 0; --l) {
    const std::size_t h = img.height >> l, w = img.width >> l;
    for (std::size_t c = 0; c < w; ++c) synthesize(img.data.data() + c, h, img.width, scratch);
    for (std::size_t r = 0; r < h; ++r) synthesize(img.data.data() + r * img.width, w, 1, scratch);
  }
}

ImagePlane denoise(const ImagePlane& img, const DenoiseOptions& options) {
  if (img.height() < 64 || img.width() < 64) {
    throw ShapeError("denoiser needs at least 64x64 pixels, got " + std::to_string(img.height()) +
                     "x" + std::to_string(img.width()));
  }
  if (!(options.sigma0 > 0.0)) throw ParameterError("denoiser sigma0 must be positive");
  if (options.levels < 1) throw ParameterError("denoiser needs at least one level");

  const std::size_t unit = std::size_t{1} << options.levels;
  const std::size_t ph = (img.height() + unit - 1) / unit * unit;
  const std::size_t pw = (img.width() + unit - 1) / unit * unit;
  WaveletImage wav = pad_symmetric(img, ph, pw);
  forward_dwt(wav, options.levels);

  const double noise_var = options.sigma0 * options.sigma0;
  for (int l = 0; l < options.levels; ++l) {
    const std::size_t h = ph >> (l + 1), w = pw >> (l + 1);
    wiener_subband(wav, 0, w, h, w, noise_var);
    wiener_subband(wav, h, 0, h, w, noise_var);
    wiener_subband(wav, h, w, h, w, noise_var);
  }
  inverse_dwt(wav, options.levels);

  std::vector<double> out(img.size());
  for (std::size_t r = 0; r < img.height(); ++r) {
    std::copy_n(wav.data.begin() + static_cast<std::ptrdiff_t>(r * pw), img.width(),
                out.begin() + static_cast<std::ptrdiff_t>(r * img.width()));
  }
  return ImagePlane(img.height(), img.width(), std::move(out));
}

ImagePlane denoise(const ImagePlane& img, double sigma0) {
  DenoiseOptions options;
  options.sigma0 = sigma0;
  return denoise(img, options);
}

ImagePlane noise_residual(const ImagePlane& img, double sigma0) {
  return img - denoise(img, sigma0);
}

}  // namespace fragile
