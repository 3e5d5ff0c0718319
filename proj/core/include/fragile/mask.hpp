#pragma once

#include <bitset>
#include <optional>
#include <string>

#include "fragile/plane.hpp"

namespace fragile {

inline constexpr int kMinCutoff = -6;
inline constexpr int kMaxCutoff = 7;

// Binary 8x8 selector over DCT subbands. Subband (i, j) is addressed 1-based
// as in the usual JPEG notation; i is the vertical frequency index.
class SubbandMask {
 public:
  SubbandMask() = default;

  static SubbandMask all();
  static SubbandMask none();
  // Every subband except DC.
  static SubbandMask all_ac();

  bool retained(int i, int j) const { return bits_.test(index(i, j)); }
  bool retained(std::size_t subband) const { return bits_.test(subband); }
  void set(int i, int j, bool on) { bits_.set(index(i, j), on); }

  std::size_t count() const { return bits_.count(); }
  bool includes_dc() const { return bits_.test(0); }

  SubbandMask complement() const;
  SubbandMask operator&(const SubbandMask& other) const;
  SubbandMask operator|(const SubbandMask& other) const;
  bool operator==(const SubbandMask& other) const = default;

  // True if every subband retained here is also retained by `other`.
  bool subset_of(const SubbandMask& other) const;

  std::string to_string() const;  // eight rows of '0'/'1'

 private:
  static std::size_t index(int i, int j);
  std::bitset<64> bits_;
};

// High-pass mask H_c: h(i, j) = [i + j - 8 - c > 0].
SubbandMask build_mask(int c);
// Complementary low-pass mask L_c.
SubbandMask build_low_mask(int c);

// A cut-off parameter or the full band.
struct Cutoff {
  std::optional<int> c;

  static Cutoff full() { return {}; }
  static Cutoff at(int value) { return {value}; }
  bool is_full() const { return !c.has_value(); }
  std::string label() const { return c ? std::to_string(*c) : std::string("full"); }
  bool operator==(const Cutoff&) const = default;
};

// H_c for a cut-off, all-ones for the full band.
SubbandMask mask_for(const Cutoff& cutoff);

// Blockwise projection IDCT(mask * DCT(plane)).
ImagePlane apply_mask(const ImagePlane& plane, const SubbandMask& mask);

}  // namespace fragile
