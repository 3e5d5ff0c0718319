#include "fragile/hsic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fragile/parallel.hpp"
#include "fragile/random.hpp"

namespace fragile {

namespace {

double squared_distance(const SampleMatrix& x, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t d = 0; d < x.dim; ++d) {
    const double t = x.at(i, d) - x.at(j, d);
    s += t * t;
  }
  return s;
}

void check_samples(const SampleMatrix& x) {
  if (x.dim == 0 || x.values.size() != x.n * x.dim) throw ParameterError("malformed sample matrix");
}

// Doubly centred Gaussian Gram matrix H K H.
std::vector<double> centred_gram(const SampleMatrix& x) {
  const std::size_t n = x.n;
  const double sigma = median_bandwidth(x);
  const double scale = -1.0 / (2.0 * sigma * sigma);
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      k[i * n + j] = k[j * n + i] = std::exp(scale * squared_distance(x, i, j));
    }
  }
  std::vector<double> row_mean(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += k[i * n + j];
    total += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  total /= static_cast<double>(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i * n + j] += total - row_mean[i] - row_mean[j];
  }
  return k;
}

std::vector<double> gram(const SampleMatrix& y) {
  const std::size_t n = y.n;
  const double sigma = median_bandwidth(y);
  const double scale = -1.0 / (2.0 * sigma * sigma);
  std::vector<double> l(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    l[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      l[i * n + j] = l[j * n + i] = std::exp(scale * squared_distance(y, i, j));
    }
  }
  return l;
}

// (1/n^2) sum_ij Kc(i, j) L(p(i), p(j)); centring one factor suffices since
// trace(HKH HLH) = trace(HKH L).
double permuted_statistic(const std::vector<double>& kc, const std::vector<double>& l,
                          const std::vector<std::size_t>& p) {
  const std::size_t n = p.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* krow = &kc[i * n];
    const double* lrow = &l[p[i] * n];
    for (std::size_t j = 0; j < n; ++j) s += krow[j] * lrow[p[j]];
  }
  return std::max(0.0, s / static_cast<double>(n * n));
}

}  // namespace

SampleMatrix SampleMatrix::scalar(std::vector<double> v) {
  SampleMatrix m;
  m.n = v.size();
  m.dim = 1;
  m.values = std::move(v);
  return m;
}

double median_bandwidth(const SampleMatrix& x) {
  check_samples(x);
  std::vector<double> d;
  d.reserve(x.n * (x.n - 1) / 2);
  for (std::size_t i = 0; i < x.n; ++i) {
    for (std::size_t j = i + 1; j < x.n; ++j) d.push_back(std::sqrt(squared_distance(x, i, j)));
  }
  if (d.empty()) throw DegenerateError("bandwidth needs at least two samples");
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  if (*mid > 0.0) return *mid;
  std::vector<double> nonzero;
  for (double v : d) {
    if (v > 0.0) nonzero.push_back(v);
  }
  if (nonzero.empty()) throw DegenerateError("all samples are identical");
  mid = nonzero.begin() + static_cast<std::ptrdiff_t>(nonzero.size() / 2);
  std::nth_element(nonzero.begin(), mid, nonzero.end());
  return *mid;
}

double hsic_statistic(const SampleMatrix& x, const SampleMatrix& y) {
  check_samples(x);
  check_samples(y);
  if (x.n != y.n) throw ParameterError("hsic samples differ in count");
  std::vector<std::size_t> id(x.n);
  std::iota(id.begin(), id.end(), std::size_t{0});
  return permuted_statistic(centred_gram(x), gram(y), id);
}

HsicOutcome hsic_test(const SampleMatrix& x, const SampleMatrix& y, double alpha,
                      std::size_t n_perm, std::uint64_t seed) {
  check_samples(x);
  check_samples(y);
  if (x.n != y.n) throw ParameterError("hsic samples differ in count");
  if (x.n < 20) throw ParameterError("hsic test needs at least 20 samples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  if (n_perm == 0) throw ParameterError("hsic test needs at least one permutation");

  const auto kc = centred_gram(x);
  const auto l = gram(y);
  std::vector<std::size_t> p(x.n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  HsicOutcome out;
  out.n = x.n;
  out.alpha = alpha;
  out.statistic = permuted_statistic(kc, l, p);

  Rng rng(seed);
  std::vector<double> null(n_perm);
  for (double& v : null) {
    for (std::size_t i = p.size() - 1; i > 0; --i) std::swap(p[i], p[uniform_index(rng, i + 1)]);
    v = permuted_statistic(kc, l, p);
  }
  std::sort(null.begin(), null.end());
  const auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(n_perm)));
  out.threshold = null[std::clamp<std::size_t>(rank, 1, n_perm) - 1];
  out.reject = out.statistic > out.threshold;
  return out;
}

const char* to_string(IndependenceScenario s) {
  return s == IndependenceScenario::high_vs_high ? "high_vs_high" : "high_vs_full";
}

IndependenceScenario scenario_from_string(const std::string& name) {
  if (name == "high_vs_high") return IndependenceScenario::high_vs_high;
  if (name == "high_vs_full") return IndependenceScenario::high_vs_full;
  throw ParameterError("unknown independence scenario '" + name + "'");
}

IndependenceReport fingerprint_independence(const ImagePlane& fp_alice,
                                            const ImagePlane& fp_mallory, int c,
                                            IndependenceScenario scenario,
                                            const IndependenceConfig& cfg, std::uint64_t seed) {
  require_same_shape(fp_alice, fp_mallory, "fingerprint independence");
  if (cfg.block == 0 || cfg.block % kBlock != 0) {
    throw ParameterError("tile size must be a positive multiple of 8");
  }
  if (cfg.block > fp_alice.height() || cfg.block > fp_alice.width()) {
    throw ParameterError("tile size exceeds the fingerprint");
  }
  const SubbandMask high = build_mask(c);
  const ImagePlane a = apply_mask(fp_alice, high);
  const ImagePlane b = scenario == IndependenceScenario::high_vs_high ? apply_mask(fp_mallory, high)
                                                                      : fp_mallory;
  std::vector<TileOutcome> tiles;
  for (const std::size_t offset : {std::size_t{0}, cfg.block / 2}) {
    for (std::size_t r = offset; r + cfg.block <= a.height(); r += cfg.block) {
      for (std::size_t col = offset; col + cfg.block <= a.width(); col += cfg.block) {
        tiles.push_back({offset, r, col, {}});
      }
    }
  }
  parallel_for(tiles.size(), [&](std::size_t t) {
    TileOutcome& tile = tiles[t];
    Rng rng = make_rng(seed, {t, 0});
    std::vector<double> xs, ys;
    const std::size_t per_side = cfg.block / kBlock;
    for (std::size_t bi = 0; bi < per_side; ++bi) {
      for (std::size_t bj = 0; bj < per_side; ++bj) {
        const std::size_t r = tile.row + bi * kBlock + uniform_index(rng, kBlock);
        const std::size_t c2 = tile.col + bj * kBlock + uniform_index(rng, kBlock);
        xs.push_back(a(r, c2));
        ys.push_back(b(r, c2));
      }
    }
    if (xs.size() > cfg.max_samples) {
      std::vector<std::size_t> idx(xs.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      for (std::size_t i = 0; i < cfg.max_samples; ++i) {
        std::swap(idx[i], idx[i + uniform_index(rng, idx.size() - i)]);
      }
      idx.resize(cfg.max_samples);
      std::sort(idx.begin(), idx.end());
      std::vector<double> sx, sy;
      for (std::size_t i : idx) sx.push_back(xs[i]), sy.push_back(ys[i]);
      xs.swap(sx);
      ys.swap(sy);
    }
    tile.outcome = hsic_test(SampleMatrix::scalar(std::move(xs)), SampleMatrix::scalar(std::move(ys)),
                             cfg.alpha, cfg.permutations, derive_seed(seed, {t, 1}));
  });
  IndependenceReport rep;
  std::size_t accepted = 0;
  for (const auto& t : tiles) accepted += t.outcome.reject ? 0 : 1;
  rep.acceptance = tiles.empty() ? 0.0 : static_cast<double>(accepted) / static_cast<double>(tiles.size());
  rep.tiles = std::move(tiles);
  return rep;
}

}  // namespace fragile
