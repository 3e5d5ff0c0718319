#pragma once

#include <span>
#include <vector>

namespace fragile {

// Threshold whose false-positive rate under a Gaussian kernel density fit of
// the negative scores equals `fpr`. Bandwidth follows Silverman's rule.
double kde_threshold(std::span<const double> negatives, double fpr);

// Silverman bandwidth 0.9 min(sd, IQR / 1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> samples);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

// Operating points for decision "score > threshold", from the highest
// threshold down; starts at (0, 0) and ends at (1, 1).
std::vector<RocPoint> roc_curve(std::span<const double> positives, std::span<const double> negatives);

// Area under the ROC curve, P(pos > neg) + P(pos == neg) / 2.
double auc(std::span<const double> positives, std::span<const double> negatives);

}  // namespace fragile
