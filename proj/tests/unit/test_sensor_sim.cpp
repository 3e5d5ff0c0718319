#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fragile/dct.hpp"
#include "fragile/error.hpp"
#include "fragile/fingerprint.hpp"
#include "fragile/sensor_sim.hpp"
#include "fragile/theory.hpp"
#include "oracles.hpp"

using namespace fragile;
using namespace fragile::sim;

namespace {

double mean_of(const ImagePlane& p) {
  double s = 0.0;
  for (double v : p.values()) s += v;
  return s / static_cast<double>(p.size());
}

double sd_of(const ImagePlane& p) {
  const double m = mean_of(p);
  double s = 0.0;
  for (double v : p.values()) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(p.size()));
}

SceneSpec flat(std::size_t n, double intensity) {
  SceneSpec s;
  s.kind = SceneKind::flat_field;
  s.height = s.width = n;
  s.intensity = intensity;
  return s;
}

}  // namespace

TEST(Camera, PrnuIsZeroMeanWithRequestedSpread) {
  const SyntheticCamera cam = new_camera(0.01, 2.0, 7, 512, 512);
  EXPECT_NEAR(mean_of(cam.prnu), 0.0, 1e-12);
  EXPECT_NEAR(sd_of(cam.prnu), 0.01, 0.0005);
}

TEST(Camera, SameSeedGivesIdenticalPrnu) {
  EXPECT_EQ(new_camera(0.01, 2.0, 3, 64, 64).prnu, new_camera(0.01, 2.0, 3, 64, 64).prnu);
  EXPECT_NE(new_camera(0.01, 2.0, 3, 64, 64).prnu, new_camera(0.01, 2.0, 4, 64, 64).prnu);
}

TEST(Camera, DegenerateAndInvalidCameras) {
  const SyntheticCamera zero = new_camera(0.0, 0.0, 1, 16, 16);
  for (double v : zero.prnu.values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(new_camera(-0.1, 2.0, 1, 16, 16), ParameterError);
  EXPECT_THROW(new_camera(0.01, -1.0, 1, 16, 16), ParameterError);
  EXPECT_THROW(new_camera(0.01, 2.0, 1, 0, 16), ParameterError);
}

TEST(Scene, FlatField) {
  const ImagePlane s = render_scene(flat(32, 128.0), 1);
  for (double v : s.values()) EXPECT_EQ(v, 128.0);
}

TEST(Scene, SpecValidation) {
  SceneSpec s = flat(32, 0.0);
  EXPECT_THROW(s.validate(), ParameterError);
  s.intensity = 300.0;
  EXPECT_THROW(render_scene(s, 1), ParameterError);
  s = flat(30, 100.0);
  EXPECT_THROW(s.validate(), ParameterError);
  EXPECT_EQ(scene_kind_from_string("textured"), SceneKind::textured);
  EXPECT_THROW(scene_kind_from_string("noise"), ParameterError);
}

TEST(Scene, LaplacianSubbandScalesAreRecovered) {
  SceneSpec s;
  s.kind = SceneKind::laplacian_synthetic;
  s.height = s.width = 512;
  const ImagePlane img = render_scene(s, 21);
  const auto scales = scene_subband_scales(s, 21);
  ImagePlane shifted = img;
  for (double& v : shifted.values()) v -= s.intensity;
  const DctPlane y = block_dct(shifted);
  for (std::size_t sb = 1; sb < 64; ++sb) {
    std::vector<double> samples;
    for (std::size_t br = 0; br < y.blocks_down(); ++br) {
      for (std::size_t bc = 0; bc < y.blocks_across(); ++bc) {
        samples.push_back(y(br * 8 + sb / 8, bc * 8 + sb % 8));
      }
    }
    const LaplaceFit fit = laplace_fit(samples);
    EXPECT_NEAR(1.0 / fit.lambda, scales[sb], 0.1 * scales[sb]) << "subband " << sb;
  }
  EXPECT_EQ(scales[0], 0.0);
}

TEST(Scene, TexturedIsSpatiallyCorrelatedAndInRange) {
  SceneSpec s;
  s.kind = SceneKind::textured;
  s.height = s.width = 128;
  const ImagePlane img = render_scene(s, 5);
  std::vector<double> a, b;
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c + 1 < img.width(); ++c) {
      a.push_back(img(r, c));
      b.push_back(img(r, c + 1));
    }
  }
  EXPECT_GT(oracle::pearson(a, b), 0.5);
  for (double v : img.values()) {
    EXPECT_GE(v, 0.2 * 255.0 - 1e-9);
    EXPECT_LE(v, 0.8 * 255.0 + 1e-9);
  }
}

TEST(Capture, NoiselessWithoutPrnuIsIdentity) {
  const SyntheticCamera cam = new_camera(0.0, 0.0, 1, 32, 32);
  SceneSpec s;
  s.kind = SceneKind::textured;
  s.height = s.width = 32;
  const ImagePlane scene = render_scene(s, 2);
  EXPECT_EQ(capture(cam, scene, 9), scene);
}

TEST(Capture, DarkSceneCarriesOnlyAdditiveNoise) {
  SyntheticCamera cam = new_camera(0.05, 3.0, 1, 64, 64);
  const ImagePlane dark(64, 64, 0.0);
  const ImagePlane a = capture(cam, dark, 4);
  cam.prnu = ImagePlane(64, 64, 0.0);
  EXPECT_EQ(capture(cam, dark, 4), a);
}

TEST(Capture, FlatFieldRevealsPrnuAtEveryIntensity) {
  SyntheticCamera cam = new_camera(0.01, 0.0, 8, 32, 32);
  for (double level : {64.0, 128.0, 192.0}) {
    const ImagePlane img = capture(cam, render_scene(flat(32, level), 0), 1);
    for (std::size_t i = 0; i < img.size(); ++i) {
      EXPECT_NEAR((img[i] - level) / level, cam.prnu[i], 1e-12);
    }
  }
}

TEST(Capture, ShapeMismatchAndDeterminism) {
  const SyntheticCamera cam = new_camera(0.01, 2.0, 1, 32, 32);
  EXPECT_THROW(capture(cam, ImagePlane(16, 16, 100.0), 1), ShapeError);
  const ImagePlane scene = render_scene(flat(32, 100.0), 0);
  EXPECT_EQ(capture(cam, scene, 3), capture(cam, scene, 3));
  EXPECT_NE(capture(cam, scene, 3), capture(cam, scene, 4));
}

TEST(Capture, FingerprintRecoverableFromNoiselessFlatFields) {
  const SyntheticCamera cam = new_camera(0.01, 0.0, 12, 128, 128);
  std::vector<ImagePlane> imgs;
  for (std::uint64_t i = 0; i < 25; ++i) imgs.push_back(capture(cam, render_scene(flat(128, 128.0), i), i));
  const Fingerprint fp = estimate_fingerprint_ml(imgs);
  EXPECT_GT(oracle::pearson(fp.plane, cam.prnu), 0.99);
}
