#include "fragile/jpeg.hpp"

#include <algorithm>
#include <string>

#include "fragile/dct.hpp"

namespace fragile {

namespace {

// ITU-T T.81 Annex K, Table K.1.
constexpr std::array<int, 64> kLuminanceBase = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99,
};

constexpr double kLevelShift = 128.0;

}  // namespace

QuantTable quant_table_for_quality(int quality) {
  if (quality < 1 || quality > 100) {
    throw ParameterError("JPEG quality " + std::to_string(quality) + " outside [1, 100]");
  }
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  QuantTable table;
  table.quality = quality;
  for (std::size_t s = 0; s < 64; ++s) {
    table.q[s] = std::clamp((kLuminanceBase[s] * scale + 50) / 100, 1, 255);
  }
  return table;
}

QuantTable flat_table() {
  QuantTable table;
  table.q.fill(1);
  table.quality = 100;
  return table;
}

DctPlane jpeg_compress(const ImagePlane& img, const QuantTable& table) {
  DctPlane out(img.height(), img.width());
  for (std::size_t br = 0; br < img.blocks_down(); ++br) {
    for (std::size_t bc = 0; bc < img.blocks_across(); ++bc) {
      Block8 x = load_block(img, br, bc);
      for (double& v : x) v -= kLevelShift;
      Block8 y = dct8(x);
      for (std::size_t s = 0; s < 64; ++s) y[s] = quantize_value(y[s], table.q[s]);
      store_block(out, br, bc, y);
    }
  }
  return out;
}

ImagePlane jpeg_decode(const DctPlane& dequantized) {
  ImagePlane out(dequantized.height(), dequantized.width());
  for (std::size_t br = 0; br < dequantized.blocks_down(); ++br) {
    for (std::size_t bc = 0; bc < dequantized.blocks_across(); ++bc) {
      Block8 x = idct8(load_block(dequantized, br, bc));
      for (double& v : x) v = std::clamp(v + kLevelShift, 0.0, 255.0);
      store_block(out, br, bc, x);
    }
  }
  return out;
}

ImagePlane jpeg_roundtrip(const ImagePlane& img, const QuantTable& table) {
  return jpeg_decode(jpeg_compress(img, table));
}

ImagePlane jpeg_roundtrip(const ImagePlane& img, int quality) {
  return jpeg_roundtrip(img, quant_table_for_quality(quality));
}

}  // namespace fragile
