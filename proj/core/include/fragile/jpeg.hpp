#pragma once

#include <array>
#include <cmath>

#include "fragile/plane.hpp"

namespace fragile {

// Luminance quantization table (row-major, 8x8) plus the quality it came from.
struct QuantTable {
  std::array<int, 64> q{};
  int quality = 0;

  int at(int i, int j) const { return q[static_cast<std::size_t>((i - 1) * 8 + (j - 1))]; }
};

// Annex K luminance table scaled with the IJG quality law.
QuantTable quant_table_for_quality(int quality);
// Table with every step equal to one.
QuantTable flat_table();

// Uniform mid-tread quantizer with round-half-up: floor(u / q + 0.5) * q.
inline double quantize_value(double u, double step) { return std::floor(u / step + 0.5) * step; }

// Level shift, blockwise DCT, quantize and dequantize. Returns the dequantized
// coefficients of the level-shifted image, i.e. what a decoder holds.
DctPlane jpeg_compress(const ImagePlane& img, const QuantTable& table);
// IDCT, undo level shift, clamp to [0, 255].
ImagePlane jpeg_decode(const DctPlane& dequantized);

ImagePlane jpeg_roundtrip(const ImagePlane& img, const QuantTable& table);
ImagePlane jpeg_roundtrip(const ImagePlane& img, int quality);

}  // namespace fragile

