#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fragile/fingerprint.hpp"
#include "fragile/mask.hpp"

namespace fragile {

// n samples of dimension dim, row-major.
struct SampleMatrix {
  std::size_t n = 0;
  std::size_t dim = 1;
  std::vector<double> values;

  static SampleMatrix scalar(std::vector<double> v);
  double at(std::size_t i, std::size_t d) const { return values[i * dim + d]; }
};

struct HsicOutcome {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject = false;
  std::size_t n = 0;
  double alpha = 0.0;
};

// Median of pairwise Euclidean distances (nonzero ones if the median is 0).
double median_bandwidth(const SampleMatrix& x);

// Biased statistic (1/n^2) trace(Kc Lc) with Gaussian kernels
// exp(-|a - b|^2 / (2 sigma^2)) and median-distance bandwidths.
double hsic_statistic(const SampleMatrix& x, const SampleMatrix& y);

inline constexpr std::size_t kDefaultPermutations = 200;

// Permutation test: the threshold is the (1 - alpha) quantile of statistics
// computed with the rows of y shuffled.
HsicOutcome hsic_test(const SampleMatrix& x, const SampleMatrix& y, double alpha,
                      std::size_t n_perm, std::uint64_t seed);

enum class IndependenceScenario { high_vs_high, high_vs_full };
const char* to_string(IndependenceScenario s);
IndependenceScenario scenario_from_string(const std::string& name);

struct TileOutcome {
  std::size_t offset = 0;  // 0 or block / 2
  std::size_t row = 0;     // top-left pixel
  std::size_t col = 0;
  HsicOutcome outcome;
};

struct IndependenceReport {
  double acceptance = 0.0;  // fraction of tiles where independence is kept
  std::vector<TileOutcome> tiles;
};

struct IndependenceConfig {
  std::size_t block = 64;
  double alpha = 0.05;
  std::size_t permutations = kDefaultPermutations;
  std::size_t max_samples = 2000;
};

// Tiles the planes into block x block squares at offsets 0 and block / 2 and
// tests independence of H_c(K_alice) against H_c(K_mallory) or K_mallory.
// Each tile contributes one pixel per 8x8 block, at a per-block position
// drawn from the tile's stream, so that samples do not share a DCT block.
IndependenceReport fingerprint_independence(const ImagePlane& fp_alice,
                                            const ImagePlane& fp_mallory, int c,
                                            IndependenceScenario scenario,
                                            const IndependenceConfig& cfg, std::uint64_t seed);

}  // namespace fragile
