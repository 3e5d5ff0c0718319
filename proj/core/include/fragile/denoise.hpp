#pragma once

#include <vector>

#include "fragile/plane.hpp"

namespace fragile {

inline constexpr double kDefaultDenoiseSigma = 5.0;

struct DenoiseOptions {
  int levels = 4;
  double sigma0 = kDefaultDenoiseSigma;  // assumed noise std, 8-bit scale
};

// Wavelet-domain adaptive Wiener filter: a four-level separable orthogonal
// decomposition with the 8-tap Daubechies filter; each detail coefficient is
// scaled by v / (v + sigma0^2), where v is the smallest local signal variance
// estimate max(0, mean(c^2) - sigma0^2) over 3x3, 5x5, 7x7 and 9x9 windows.
// Requires at least 64x64 pixels.
ImagePlane denoise(const ImagePlane& img, const DenoiseOptions& options = {});
ImagePlane denoise(const ImagePlane& img, double sigma0);

// W = I - F(I).
ImagePlane noise_residual(const ImagePlane& img, double sigma0 = kDefaultDenoiseSigma);

// Periodic orthogonal wavelet transform on an arbitrary even-sized buffer;
// exposed for tests. Coefficients use the Mallat layout.
struct WaveletImage {
  std::size_t height = 0, width = 0;
  std::vector<double> data;
};
void forward_dwt(WaveletImage& img, int levels);
void inverse_dwt(WaveletImage& img, int levels);

}  // namespace fragile
