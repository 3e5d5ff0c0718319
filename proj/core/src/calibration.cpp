#include "fragile/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fragile/error.hpp"
#include "fragile/plane.hpp"

namespace fragile {

namespace {

double quantile_sorted(const std::vector<double>& s, double p) {
  const double pos = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw ParameterError("bandwidth needs at least two samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double sd = stddev(samples) * std::sqrt(static_cast<double>(s.size()) /
                                                static_cast<double>(s.size() - 1));
  const double iqr = quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) throw DegenerateError("negative scores are all identical");
  return 0.9 * spread * std::pow(static_cast<double>(s.size()), -0.2);
}

double kde_threshold(std::span<const double> negatives, double fpr) {
  if (!(fpr > 0.0 && fpr < 1.0)) throw ParameterError("fpr must lie in (0, 1)");
  const double h = silverman_bandwidth(negatives);
  auto survival = [&](double t) {
    double s = 0.0;
    for (double x : negatives) s += 0.5 * std::erfc((t - x) / (h * std::sqrt(2.0)));
    return s / static_cast<double>(negatives.size());
  };
  const auto [mn, mx] = std::minmax_element(negatives.begin(), negatives.end());
  double lo = *mn - 40.0 * h, hi = *mx + 40.0 * h;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (survival(mid) > fpr ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<RocPoint> roc_curve(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) throw ParameterError("roc needs both classes");
  std::vector<double> thresholds(positives.begin(), positives.end());
  thresholds.insert(thresholds.end(), negatives.begin(), negatives.end());
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  std::vector<double> pos(positives.begin(), positives.end());
  std::vector<double> neg(negatives.begin(), negatives.end());
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  auto above = [](const std::vector<double>& v, double t) {
    return static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), t)) /
           static_cast<double>(v.size());
  };

  std::vector<RocPoint> out;
  out.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  for (double t : thresholds) {
    // Step just below t so that scores equal to t count as positive decisions.
    const double below = std::nextafter(t, -std::numeric_limits<double>::infinity());
    out.push_back({below, above(neg, below), above(pos, below)});
  }
  return out;
}

double auc(std::span<const double> positives, std::span<const double> negatives) {
  if (positives.empty() || negatives.empty()) throw ParameterError("auc needs both classes");
  std::vector<double> neg(negatives.begin(), negatives.end());
  std::sort(neg.begin(), neg.end());
  double wins = 0.0;
  for (double p : positives) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(lo, neg.end(), p);
    wins += static_cast<double>(lo - neg.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(positives.size()) * static_cast<double>(negatives.size()));
}

}  // namespace fragile
