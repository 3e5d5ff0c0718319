#pragma once

#include "fragile/fingerprint.hpp"

namespace fragile {

struct CopyAttackConfig {
  double alpha = 0.0;  // embedding strength
  bool clamp = true;   // clamp the forged image to [0, 255]
};

// J' = J * (1 + alpha * K_E).
ImagePlane copy_attack(const ImagePlane& j, const Fingerprint& fp_e, const CopyAttackConfig& cfg);
ImagePlane copy_attack(const ImagePlane& j, const ImagePlane& k_e, const CopyAttackConfig& cfg);

// Log-spaced grid, `count` values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

}  // namespace fragile
