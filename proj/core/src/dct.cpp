#include "fragile/dct.hpp"

#include <cmath>
#include <numbers>

namespace fragile {

const std::array<double, 64>& dct_basis() {
  static const std::array<double, 64> basis = [] {
    std::array<double, 64> d{};
    for (std::size_t k = 0; k < 8; ++k) {
      const double a = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (std::size_t n = 0; n < 8; ++n) {
        d[k * 8 + n] = a * std::cos(std::numbers::pi * (2.0 * n + 1.0) * k / 16.0);
      }
    }
    return d;
  }();
  return basis;
}

Block8 dct8(const Block8& x) {
  const auto& d = dct_basis();
  Block8 tmp{};
  // tmp = D X
  for (std::size_t k = 0; k < 8; ++k) {
    for (std::size_t c = 0; c < 8; ++c) {
      double s = 0.0;
      for (std::size_t n = 0; n < 8; ++n) s += d[k * 8 + n] * x[n * 8 + c];
      tmp[k * 8 + c] = s;
    }
  }
  Block8 y{};
  // y = tmp D^T
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t l = 0; l < 8; ++l) {
      double s = 0.0;
      for (std::size_t n = 0; n < 8; ++n) s += tmp[r * 8 + n] * d[l * 8 + n];
      y[r * 8 + l] = s;
    }
  }
  return y;
}

Block8 idct8(const Block8& y) {
  const auto& d = dct_basis();
  Block8 tmp{};
  // tmp = D^T Y
  for (std::size_t n = 0; n < 8; ++n) {
    for (std::size_t c = 0; c < 8; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < 8; ++k) s += d[k * 8 + n] * y[k * 8 + c];
      tmp[n * 8 + c] = s;
    }
  }
  Block8 x{};
  // x = tmp D
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t m = 0; m < 8; ++m) {
      double s = 0.0;
      for (std::size_t l = 0; l < 8; ++l) s += tmp[r * 8 + l] * d[l * 8 + m];
      x[r * 8 + m] = s;
    }
  }
  return x;
}

DctPlane block_dct(const ImagePlane& img) {
  DctPlane out(img.height(), img.width());
  for (std::size_t br = 0; br < img.blocks_down(); ++br) {
    for (std::size_t bc = 0; bc < img.blocks_across(); ++bc) {
      store_block(out, br, bc, dct8(load_block(img, br, bc)));
    }
  }
  return out;
}

ImagePlane block_idct(const DctPlane& coefficients) {
  ImagePlane out(coefficients.height(), coefficients.width());
  for (std::size_t br = 0; br < coefficients.blocks_down(); ++br) {
    for (std::size_t bc = 0; bc < coefficients.blocks_across(); ++bc) {
      store_block(out, br, bc, idct8(load_block(coefficients, br, bc)));
    }
  }
  return out;
}

}  // namespace fragile
