#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "fragile/dct.hpp"
#include "fragile/error.hpp"
#include "fragile/image_io.hpp"
#include "fragile/jpeg.hpp"
#include "fragile/mask.hpp"
#include "fragile/parallel.hpp"
#include "fragile/random.hpp"
#include "oracles.hpp"

using namespace fragile;

namespace {

Block8 random_block(std::uint64_t seed, double sd = 50.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  Block8 b;
  for (double& v : b) v = g(rng);
  return b;
}

std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "fragile_core_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Plane, RejectsDimensionsOffTheBlockGrid) {
  EXPECT_THROW(ImagePlane(12, 16), ShapeError);
  EXPECT_THROW(ImagePlane(0, 8), ShapeError);
  EXPECT_THROW(ImagePlane(8, 8, std::vector<double>(10)), ShapeError);
  ImagePlane p(16, 24, 3.0);
  EXPECT_EQ(p.block_count(), 6u);
  EXPECT_EQ(p.size(), 16u * 24u);
}

TEST(Dct, ConstantBlockHasOnlyDc) {
  Block8 x;
  x.fill(8.0);
  const Block8 y = dct8(x);
  EXPECT_NEAR(y[0], 64.0, 1e-12);
  for (std::size_t s = 1; s < 64; ++s) EXPECT_NEAR(y[s], 0.0, 1e-12);
}

TEST(Dct, MatchesDirectDoubleSum) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Block8 x = random_block(seed);
    const Block8 fast = dct8(x);
    const Block8 slow = oracle::dct8(x);
    for (std::size_t s = 0; s < 64; ++s) EXPECT_NEAR(fast[s], slow[s], 1e-9);
  }
}

TEST(Dct, InverseMatchesDirectDoubleSum) {
  const Block8 y = random_block(99);
  const Block8 fast = idct8(y);
  const Block8 slow = oracle::idct8(y);
  for (std::size_t s = 0; s < 64; ++s) EXPECT_NEAR(fast[s], slow[s], 1e-9);
}

TEST(Dct, ParsevalPerBlock) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Block8 x = random_block(seed);
    const Block8 y = dct8(x);
    double ex = 0.0, ey = 0.0;
    for (std::size_t s = 0; s < 64; ++s) ex += x[s] * x[s], ey += y[s] * y[s];
    EXPECT_NEAR(std::sqrt(ex), std::sqrt(ey), 1e-9);
  }
}

TEST(Dct, PlaneRoundTrip) {
  const ImagePlane x = oracle::random_plane(16, 16, 4, 40.0, 120.0);
  const ImagePlane back = block_idct(block_dct(x));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(back[i], x[i], 1e-9);
}

TEST(Mask, RetainedCountsMatchEnumeration) {
  for (int c = kMinCutoff; c <= kMaxCutoff; ++c) {
    std::size_t brute = 0, formula = 0;
    for (int i = 1; i <= 8; ++i) {
      for (int j = 1; j <= 8; ++j) brute += (i + j - 8 - c > 0) ? 1 : 0;
    }
    for (int k = std::max(2, 9 + c); k <= 16; ++k) formula += static_cast<std::size_t>(std::min(k - 1, 17 - k));
    const SubbandMask h = build_mask(c);
    EXPECT_EQ(h.count(), brute) << "c = " << c;
    EXPECT_EQ(h.count(), formula) << "c = " << c;
    for (int i = 1; i <= 8; ++i) {
      for (int j = 1; j <= 8; ++j) EXPECT_EQ(h.retained(i, j), i + j - 8 - c > 0);
    }
  }
  EXPECT_EQ(build_mask(1).count(), 28u);
  EXPECT_EQ(build_mask(0).count(), 36u);
  EXPECT_EQ(build_mask(7).count(), 1u);
  EXPECT_TRUE(build_mask(7).retained(8, 8));
}

TEST(Mask, OutOfRangeCutoffThrows) {
  EXPECT_THROW(build_mask(8), ParameterError);
  EXPECT_THROW(build_mask(-7), ParameterError);
  EXPECT_THROW(build_low_mask(8), ParameterError);
}

TEST(Mask, LowIsComplementAndMasksNest) {
  for (int c = kMinCutoff; c <= kMaxCutoff; ++c) {
    const SubbandMask h = build_mask(c), l = build_low_mask(c);
    EXPECT_EQ((h & l).count(), 0u);
    EXPECT_EQ(h | l, SubbandMask::all());
    EXPECT_EQ(l, h.complement());
    if (c < kMaxCutoff) {
      EXPECT_TRUE(build_mask(c + 1).subset_of(h));
    }
  }
  // DC sits at i + j = 2, so no cut-off in range reaches it.
  for (int c = kMinCutoff; c <= kMaxCutoff; ++c) {
    EXPECT_FALSE(build_mask(c).includes_dc());
    EXPECT_TRUE(build_low_mask(c).includes_dc());
  }
  EXPECT_EQ(build_mask(kMinCutoff).count(), 63u);
}

TEST(Mask, ApplyMaskProjections) {
  const ImagePlane x = oracle::random_plane(32, 32, 11, 30.0);
  const ImagePlane same = apply_mask(x, SubbandMask::all());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(same[i], x[i], 1e-9);

  const ImagePlane h1 = apply_mask(x, build_mask(1));
  const ImagePlane twice = apply_mask(h1, build_mask(1));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(twice[i], h1[i], 1e-9);

  for (int c = -3; c <= 5; ++c) {
    const ImagePlane hi = apply_mask(x, build_mask(c));
    const ImagePlane lo = apply_mask(x, build_low_mask(c));
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(hi[i] + lo[i], x[i], 1e-9);
  }
}

TEST(Mask, ApplyMaskMatchesOracle) {
  const ImagePlane x = oracle::random_plane(16, 24, 12, 30.0);
  const ImagePlane fast = apply_mask(x, build_mask(2));
  const ImagePlane slow = oracle::masked(x, build_mask(2));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(fast[i], slow[i], 1e-9);
}

TEST(Mask, CutoffLabels) {
  EXPECT_EQ(Cutoff::full().label(), "full");
  EXPECT_EQ(Cutoff::at(3).label(), "3");
  EXPECT_EQ(mask_for(Cutoff::full()), SubbandMask::all());
  EXPECT_EQ(mask_for(Cutoff::at(2)), build_mask(2));
}

TEST(Jpeg, QualityTables) {
  const QuantTable q50 = quant_table_for_quality(50);
  EXPECT_EQ(q50.at(1, 1), 16);
  EXPECT_EQ(q50.at(8, 8), 99);
  const QuantTable q100 = quant_table_for_quality(100);
  for (int v : q100.q) EXPECT_EQ(v, 1);
  const QuantTable q70 = quant_table_for_quality(70), q90 = quant_table_for_quality(90);
  for (std::size_t s = 0; s < 64; ++s) {
    EXPECT_GE(q70.q[s], q90.q[s]);
    EXPECT_GE(q90.q[s], 1);
    EXPECT_LE(quant_table_for_quality(1).q[s], 255);
  }
  // Scaling law at quality 90: scale 20, entry floor((16 * 20 + 50) / 100) = 3.
  EXPECT_EQ(q90.at(1, 1), 3);
  EXPECT_THROW(quant_table_for_quality(0), ParameterError);
  EXPECT_THROW(quant_table_for_quality(101), ParameterError);
}

TEST(Jpeg, RoundHalfUpQuantizer) {
  EXPECT_DOUBLE_EQ(quantize_value(7.6, 5.0), 10.0);
  EXPECT_DOUBLE_EQ(quantize_value(-2.5, 1.0), -2.0);
  EXPECT_DOUBLE_EQ(quantize_value(2.5, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(quantize_value(-7.6, 5.0), -10.0);
}

TEST(Jpeg, SingleCoefficientDequantization) {
  // One block with Y(1, 2) = 7.6 and a flat step-5 table.
  Block8 y{};
  y[1] = 7.6;
  ImagePlane img(8, 8);
  store_block(img, 0, 0, idct8(y));
  for (double& v : img.values()) v += 128.0;
  QuantTable t = flat_table();
  t.q.fill(5);
  const DctPlane dq = jpeg_compress(img, t);
  EXPECT_NEAR(dq(0, 1), 10.0, 1e-9);
  for (std::size_t s = 0; s < 64; ++s) {
    if (s != 1) {
      EXPECT_NEAR(dq[s], 0.0, 1e-9);
    }
  }
}

TEST(Jpeg, ConstantMidGreyIsUnchanged) {
  const ImagePlane img(16, 16, 128.0);
  for (int q : {100, 75, 10}) EXPECT_EQ(jpeg_roundtrip(img, q), img);
}

TEST(Jpeg, Quality100OnIntegerCoefficients) {
  // Integer coefficients survive unit-step quantization exactly.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> d(-20, 20);
  Block8 y{};
  for (double& v : y) v = d(rng);
  ImagePlane img(8, 8);
  store_block(img, 0, 0, idct8(y));
  for (double& v : img.values()) v += 128.0;
  const DctPlane dq = jpeg_compress(img, quant_table_for_quality(100));
  for (std::size_t s = 0; s < 64; ++s) EXPECT_NEAR(dq[s], y[s], 0.5);
  const ImagePlane back = jpeg_roundtrip(img, 100);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_NEAR(back[i], img[i], 1e-9);
}

TEST(Jpeg, RoundTripIsIdempotentWithoutClamping) {
  const ImagePlane img = oracle::random_plane(32, 32, 5, 15.0, 128.0);
  for (int q : {95, 85, 70}) {
    const ImagePlane once = jpeg_roundtrip(img, q);
    ASSERT_TRUE(std::all_of(once.values().begin(), once.values().end(),
                            [](double v) { return v > 0.0 && v < 255.0; }));
    const DctPlane a = jpeg_compress(once, quant_table_for_quality(q));
    const DctPlane b = jpeg_compress(jpeg_roundtrip(once, q), quant_table_for_quality(q));
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(Jpeg, DecodeClampsToPixelRange) {
  const ImagePlane img = oracle::random_plane(16, 16, 6, 200.0, 128.0);
  const ImagePlane out = jpeg_roundtrip(img, 50);
  for (double v : out.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 255.0);
  }
}

TEST(ImageIo, PgmRoundTripAndCrop) {
  ImagePlane img(16, 24);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(i % 256);
  const auto path = temp_path("a.pgm");
  write_pgm(path, img);
  EXPECT_EQ(read_image(path), img);

  // 20x30 8-bit file is cropped to the central 16x24.
  const auto odd = temp_path("odd.pgm");
  {
    std::ofstream f(odd, std::ios::binary);
    f << "P5\n30 20\n255\n";
    for (int r = 0; r < 20; ++r) {
      for (int c = 0; c < 30; ++c) f.put(static_cast<char>(r * 10 + c));
    }
  }
  const ImagePlane cropped = read_pgm(odd);
  ASSERT_EQ(cropped.height(), 16u);
  ASSERT_EQ(cropped.width(), 24u);
  EXPECT_DOUBLE_EQ(cropped(0, 0), 2 * 10 + 3);
}

TEST(ImageIo, SixteenBitPgmIsRescaled) {
  const auto path = temp_path("wide.pgm");
  {
    std::ofstream f(path, std::ios::binary);
    f << "P5\n8 8\n65535\n";
    for (int i = 0; i < 64; ++i) {
      f.put(static_cast<char>(0xff));
      f.put(static_cast<char>(0xff));
    }
  }
  const ImagePlane img = read_pgm(path);
  EXPECT_NEAR(img(3, 3), 255.0, 1e-9);
}

TEST(ImageIo, CropWindowAndErrors) {
  const CropWindow w = center_crop_window(21, 35);
  EXPECT_EQ(w.height, 16u);
  EXPECT_EQ(w.width, 32u);
  EXPECT_EQ(w.top, 2u);
  EXPECT_EQ(w.left, 1u);
  EXPECT_THROW(read_image(temp_path("missing.pgm")), IoError);
  const auto junk = temp_path("junk.pgm");
  std::ofstream(junk) << "not an image";
  EXPECT_THROW(read_image(junk), IoError);
}

TEST(Random, DerivedSeedsAreStableAndDistinct) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(2, {2}));
  Rng a = make_rng(5, {1}), b = make_rng(5, {1});
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
}

TEST(Random, LaplaceScaleFromSamples) {
  Rng rng(17);
  double s = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) s += std::abs(sample_laplace(rng, 2.0));
  EXPECT_NEAR(s / n, 2.0, 0.02);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(uniform_index(rng, 7), 7u);
}

TEST(Parallel, CoversEveryIndexAndRethrows) {
  set_thread_count(4);
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  EXPECT_THROW(parallel_for(100,
                            [](std::size_t i) {
                              if (i == 42) throw ParameterError("boom");
                            }),
               ParameterError);
  set_thread_count(0);
}
