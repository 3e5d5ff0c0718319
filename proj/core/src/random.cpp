#include "fragile/random.hpp"

#include <cmath>

namespace fragile {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
  return h;
}

double sample_laplace(Rng& rng, double b) {
  // Inverse CDF on a uniform in (-1/2, 1/2); never hits the endpoints.
  const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53 - 0.5;
  const double mag = -b * std::log(1.0 - 2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

double sample_normal(Rng& rng, double mean, double sd) {
  // Box-Muller with our own uniform draws, so streams are identical across
  // standard library implementations.
  const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double sample_uniform(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace fragile
