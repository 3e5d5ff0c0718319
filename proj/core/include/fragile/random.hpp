#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fragile {

using Rng = std::mt19937_64;

// Derives an independent stream seed from a master seed and a path of
// integers (cell index, image index, ...). Stable across platforms.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(master, path));
}

// Zero-mean Laplace sample with scale b (density exp(-|x|/b) / 2b).
double sample_laplace(Rng& rng, double b);

double sample_normal(Rng& rng, double mean, double sd);

// Uniform in [0, 1).
double sample_uniform(Rng& rng);

// Uniform integer in [0, n), unbiased.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

}  // namespace fragile
