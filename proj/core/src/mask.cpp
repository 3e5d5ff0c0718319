#include "fragile/mask.hpp"

#include "fragile/dct.hpp"

namespace fragile {

std::size_t SubbandMask::index(int i, int j) {
  if (i < 1 || i > 8 || j < 1 || j > 8) {
    throw ParameterError("subband index out of range: (" + std::to_string(i) + ", " +
                         std::to_string(j) + ")");
  }
  return static_cast<std::size_t>((i - 1) * 8 + (j - 1));
}

SubbandMask SubbandMask::all() {
  SubbandMask m;
  m.bits_.set();
  return m;
}

SubbandMask SubbandMask::none() { return SubbandMask{}; }

SubbandMask SubbandMask::all_ac() {
  SubbandMask m = all();
  m.bits_.reset(0);
  return m;
}

SubbandMask SubbandMask::complement() const {
  SubbandMask m;
  m.bits_ = ~bits_;
  return m;
}

SubbandMask SubbandMask::operator&(const SubbandMask& other) const {
  SubbandMask m;
  m.bits_ = bits_ & other.bits_;
  return m;
}

SubbandMask SubbandMask::operator|(const SubbandMask& other) const {
  SubbandMask m;
  m.bits_ = bits_ | other.bits_;
  return m;
}

bool SubbandMask::subset_of(const SubbandMask& other) const {
  return (bits_ & ~other.bits_).none();
}

std::string SubbandMask::to_string() const {
  std::string out;
  for (int i = 1; i <= 8; ++i) {
    for (int j = 1; j <= 8; ++j) out.push_back(retained(i, j) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

SubbandMask build_mask(int c) {
  if (c < kMinCutoff || c > kMaxCutoff) {
    throw ParameterError("cut-off " + std::to_string(c) + " outside [" +
                         std::to_string(kMinCutoff) + ", " + std::to_string(kMaxCutoff) + "]");
  }
  SubbandMask m;
  for (int i = 1; i <= 8; ++i) {
    for (int j = 1; j <= 8; ++j) m.set(i, j, i + j - 8 - c > 0);
  }
  return m;
}

SubbandMask build_low_mask(int c) { return build_mask(c).complement(); }

SubbandMask mask_for(const Cutoff& cutoff) {
  return cutoff.is_full() ? SubbandMask::all() : build_mask(*cutoff.c);
}

ImagePlane apply_mask(const ImagePlane& plane, const SubbandMask& mask) {
  ImagePlane out(plane.height(), plane.width());
  for (std::size_t br = 0; br < plane.blocks_down(); ++br) {
    for (std::size_t bc = 0; bc < plane.blocks_across(); ++bc) {
      Block8 y = dct8(load_block(plane, br, bc));
      for (std::size_t s = 0; s < 64; ++s) {
        if (!mask.retained(s)) y[s] = 0.0;
      }
      store_block(out, br, bc, idct8(y));
    }
  }
  return out;
}

}  // namespace fragile
