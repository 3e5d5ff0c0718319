#include "fragile/attacks.hpp"

#include <algorithm>
#include <cmath>

namespace fragile {

ImagePlane copy_attack(const ImagePlane& j, const ImagePlane& k_e, const CopyAttackConfig& cfg) {
  require_same_shape(j, k_e, "copy attack");
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) {
    throw ParameterError("embedding strength must be a finite nonnegative number");
  }
  ImagePlane out = j;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = j[i] * (1.0 + cfg.alpha * k_e[i]);
    if (cfg.clamp) out[i] = std::clamp(out[i], 0.0, 255.0);
  }
  return out;
}

ImagePlane copy_attack(const ImagePlane& j, const Fingerprint& fp_e, const CopyAttackConfig& cfg) {
  return copy_attack(j, fp_e.plane, cfg);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw ParameterError("invalid log grid");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.back() = hi;
  return out;
}

}  // namespace fragile
