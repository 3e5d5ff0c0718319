#pragma once

#include "fragile/sensor_sim.hpp"

namespace bench {

inline fragile::ImagePlane textured_capture(std::size_t n, std::uint64_t seed) {
  using namespace fragile;
  const auto cam = sim::new_camera(sim::kDefaultSigmaPrnu, sim::kDefaultSigmaGamma, seed, n, n);
  sim::SceneSpec s;
  s.kind = sim::SceneKind::textured;
  s.height = s.width = n;
  return sim::capture(cam, sim::render_scene(s, seed), seed);
}

}  // namespace bench
