#pragma once

#include <array>

#include "fragile/plane.hpp"

namespace fragile {

// One 8x8 block in row-major order; index u * 8 + v.
using Block8 = std::array<double, 64>;

// Orthonormal 1-D DCT-II basis, basis(k, n) = a(k) cos(pi (2n + 1) k / 16).
const std::array<double, 64>& dct_basis();

// 2-D orthonormal DCT-II of one block: Y = D X D^T.
Block8 dct8(const Block8& pixels);
// Inverse: X = D^T Y D.
Block8 idct8(const Block8& coefficients);

template <class Tag>
Block8 load_block(const Plane<Tag>& plane, std::size_t block_row, std::size_t block_col) {
  Block8 out;
  const std::size_t r0 = block_row * kBlock;
  const std::size_t c0 = block_col * kBlock;
  for (std::size_t u = 0; u < kBlock; ++u) {
    for (std::size_t v = 0; v < kBlock; ++v) out[u * kBlock + v] = plane(r0 + u, c0 + v);
  }
  return out;
}

template <class Tag>
void store_block(Plane<Tag>& plane, std::size_t block_row, std::size_t block_col,
                 const Block8& block) {
  const std::size_t r0 = block_row * kBlock;
  const std::size_t c0 = block_col * kBlock;
  for (std::size_t u = 0; u < kBlock; ++u) {
    for (std::size_t v = 0; v < kBlock; ++v) plane(r0 + u, c0 + v) = block[u * kBlock + v];
  }
}

DctPlane block_dct(const ImagePlane& img);
ImagePlane block_idct(const DctPlane& coefficients);

}  // namespace fragile
