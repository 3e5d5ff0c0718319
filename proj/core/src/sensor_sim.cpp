#include "fragile/sensor_sim.hpp"

#include <algorithm>
#include <cmath>

#include "fragile/dct.hpp"
#include "fragile/random.hpp"

namespace fragile::sim {

SyntheticCamera new_camera(double sigma_prnu, double sigma_gamma, std::uint64_t seed,
                           std::size_t height, std::size_t width) {
  if (!(sigma_prnu >= 0.0) || !(sigma_gamma >= 0.0)) {
    throw ParameterError("camera noise levels must be non-negative");
  }
  if (height == 0 || width == 0) throw ParameterError("camera dimensions must be positive");
  SyntheticCamera cam{ImagePlane(height, width), sigma_prnu, sigma_gamma, seed};
  if (sigma_prnu == 0.0) return cam;

  Rng rng = make_rng(seed, {0x70726e75});
  auto k = cam.prnu.values();
  for (double& v : k) v = sample_normal(rng, 0.0, sigma_prnu);
  const double m = mean(k);
  for (double& v : k) v -= m;
  return cam;
}

void SceneSpec::validate() const {
  if (!(intensity > 0.0 && intensity <= 255.0)) {
    throw ParameterError("scene intensity must lie in (0, 255]");
  }
  if (height == 0 || width == 0 || height % kBlock != 0 || width % kBlock != 0) {
    throw ParameterError("scene dimensions must be positive multiples of 8");
  }
  if (kind == SceneKind::laplacian_synthetic &&
      !(scale_min > 0.0 && scale_max >= scale_min && scale_decay >= 0.0)) {
    throw ParameterError("laplacian scene needs 0 < scale_min <= scale_max and decay >= 0");
  }
  if (kind == SceneKind::textured && !(correlation_length > 0.0)) {
    throw ParameterError("textured scene needs a positive correlation length");
  }
}

const char* to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::flat_field:
      return "flat_field";
    case SceneKind::laplacian_synthetic:
      return "laplacian_synthetic";
    case SceneKind::textured:
      return "textured";
  }
  return "?";
}

SceneKind scene_kind_from_string(const std::string& name) {
  if (name == "flat_field") return SceneKind::flat_field;
  if (name == "laplacian_synthetic") return SceneKind::laplacian_synthetic;
  if (name == "textured") return SceneKind::textured;
  throw ParameterError("unknown scene kind '" + name + "'");
}

std::array<double, 64> scene_subband_scales(const SceneSpec& spec, std::uint64_t seed) {
  Rng rng = make_rng(seed, {0x7363616c});
  std::array<double, 64> b{};
  for (std::size_t s = 1; s < 64; ++s) {
    const double draw = spec.scale_min + (spec.scale_max - spec.scale_min) *
                                             ((static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53);
    const double freq = static_cast<double>(s / 8 + s % 8);
    b[s] = draw * std::exp(-spec.scale_decay * freq);
  }
  return b;
}

namespace {

ImagePlane render_laplacian(const SceneSpec& spec, std::uint64_t seed) {
  const auto scales = scene_subband_scales(spec, seed);
  Rng rng = make_rng(seed, {0x636f6566});
  ImagePlane out(spec.height, spec.width);
  for (std::size_t br = 0; br < out.blocks_down(); ++br) {
    for (std::size_t bc = 0; bc < out.blocks_across(); ++bc) {
      Block8 y{};
      y[0] = 8.0 * spec.intensity;  // orthonormal DC = 8 * block mean
      for (std::size_t s = 1; s < 64; ++s) y[s] = sample_laplace(rng, scales[s]);
      Block8 x = idct8(y);
      for (double& v : x) v = std::clamp(v, 0.0, 255.0);
      store_block(out, br, bc, x);
    }
  }
  return out;
}

// Separable Gaussian blur with reflected borders.
std::vector<double> gaussian_blur(const std::vector<double>& in, std::size_t h, std::size_t w,
                                  double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * i * i / (sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = v;
    norm += v;
  }
  for (double& v : kernel) v /= norm;

  auto reflect = [](long i, long n) {
    while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
    return static_cast<std::size_t>(i);
  };
  std::vector<double> tmp(in.size()), out(in.size());
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double s = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        s += kernel[static_cast<std::size_t>(k + radius)] *
             in[r * w + reflect(static_cast<long>(c) + k, static_cast<long>(w))];
      }
      tmp[r * w + c] = s;
    }
  }
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double s = 0.0;
      for (int k = -radius; k <= radius; ++k) {
        s += kernel[static_cast<std::size_t>(k + radius)] *
             tmp[reflect(static_cast<long>(r) + k, static_cast<long>(h)) * w + c];
      }
      out[r * w + c] = s;
    }
  }
  return out;
}

ImagePlane render_textured(const SceneSpec& spec, std::uint64_t seed) {
  Rng rng = make_rng(seed, {0x74657874});
  std::vector<double> noise(spec.height * spec.width);
  for (double& v : noise) v = sample_normal(rng, 0.0, 1.0);
  std::vector<double> field = gaussian_blur(noise, spec.height, spec.width, spec.correlation_length);
  const auto [lo_it, hi_it] = std::minmax_element(field.begin(), field.end());
  const double lo = *lo_it, hi = *hi_it;
  const double span = hi > lo ? hi - lo : 1.0;
  for (double& v : field) v = 255.0 * (0.2 + 0.6 * (v - lo) / span);
  return ImagePlane(spec.height, spec.width, std::move(field));
}

}  // namespace

ImagePlane render_scene(const SceneSpec& spec, std::uint64_t seed) {
  spec.validate();
  switch (spec.kind) {
    case SceneKind::flat_field:
      return ImagePlane(spec.height, spec.width, spec.intensity);
    case SceneKind::laplacian_synthetic:
      return render_laplacian(spec, seed);
    case SceneKind::textured:
      return render_textured(spec, seed);
  }
  throw ParameterError("unknown scene kind");
}

ImagePlane capture(const SyntheticCamera& cam, const ImagePlane& scene, std::uint64_t seed) {
  require_same_shape(cam.prnu, scene, "capture");
  Rng rng = make_rng(seed, {0x63617074});
  std::vector<double> out(scene.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double i0 = scene[i];
    double v = i0 + i0 * cam.prnu[i];
    if (cam.sigma_gamma > 0.0) v += sample_normal(rng, 0.0, cam.sigma_gamma);
    out[i] = std::clamp(v, 0.0, 255.0);
  }
  return ImagePlane(scene.height(), scene.width(), std::move(out));
}

}  // namespace fragile::sim
