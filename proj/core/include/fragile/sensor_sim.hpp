#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "fragile/plane.hpp"

namespace fragile::sim {

// Ground-truth camera for the capture model I = I0 + I0 * K + Gamma.
struct SyntheticCamera {
  ImagePlane prnu;           // K, zero-mean
  double sigma_prnu = 0.0;   // std of K
  double sigma_gamma = 0.0;  // std of the additive noise, 8-bit scale
  std::uint64_t seed = 0;
};

inline constexpr double kDefaultSigmaPrnu = 0.01;
inline constexpr double kDefaultSigmaGamma = 2.0;
inline constexpr std::size_t kDefaultSize = 512;

// Draws K i.i.d. Gaussian and removes its mean. sigma_prnu == 0 yields the
// degenerate camera with K = 0.
SyntheticCamera new_camera(double sigma_prnu, double sigma_gamma, std::uint64_t seed,
                           std::size_t height = kDefaultSize, std::size_t width = kDefaultSize);

enum class SceneKind { flat_field, laplacian_synthetic, textured };

struct SceneSpec {
  SceneKind kind = SceneKind::flat_field;
  std::size_t height = kDefaultSize;
  std::size_t width = kDefaultSize;
  double intensity = 128.0;  // mean pixel value, in (0, 255]

  // laplacian_synthetic: each AC subband gets a Laplace scale b drawn
  // uniformly from [scale_min, scale_max] and attenuated by
  // exp(-scale_decay * (u + v)) for 0-based frequency indices (u, v).
  double scale_min = 2.0;
  double scale_max = 8.0;
  double scale_decay = 0.0;

  // textured: std of the Gaussian low-pass filter, in pixels.
  double correlation_length = 4.0;

  void validate() const;
};

const char* to_string(SceneKind kind);
SceneKind scene_kind_from_string(const std::string& name);

ImagePlane render_scene(const SceneSpec& spec, std::uint64_t seed);

// Per-subband Laplace scales used by render_scene for a laplacian_synthetic
// scene with this seed (index u * 8 + v; DC entry is 0).
std::array<double, 64> scene_subband_scales(const SceneSpec& spec, std::uint64_t seed);

// Noiseless PRNU modulation plus additive Gaussian noise, clamped to [0, 255].
ImagePlane capture(const SyntheticCamera& cam, const ImagePlane& scene, std::uint64_t seed);

}  // namespace fragile::sim
