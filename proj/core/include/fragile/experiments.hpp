#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fragile/manifest.hpp"
#include "fragile/result_table.hpp"

namespace fragile {

// The main table has one row per seed and grid cell. Extras carry companion
// tables such as medians over seeds or ROC points, keyed by a file suffix.
struct ExperimentResult {
  ResultTable table;
  std::vector<std::pair<std::string, ResultTable>> extras;
};

// Columns: seed, n_images, quality, c, rho, r, phi1, phi2, dropped.
ExperimentResult run_bound_curves(const ExperimentManifest& m);
// Columns: seed, quality, c, phi1, phi2.
ExperimentResult run_fingerprint_quality(const ExperimentManifest& m);
// Columns: seed, c, positives, negatives, auc, threshold, tpr_at_threshold.
ExperimentResult run_roc(const ExperimentManifest& m);
// Columns: seed, quality, c, alpha, mean_pce, median_pce, threshold, above_threshold.
ExperimentResult run_copy_attack(const ExperimentManifest& m);
// Columns: seed, quality, c, scope, count, the nine true_pred cells, diagonal,
// free_coefficients, infeasible_blocks.
ExperimentResult run_dct_recovery(const ExperimentManifest& m);
// Columns: seed, quality, c, scenario, acceptance, tiles.
ExperimentResult run_hsic(const ExperimentManifest& m);
// Columns: seed, alpha, triangle_ratio, safe_false_alarm, fragile_ratio,
// mean_fragile_pce, threshold.
ExperimentResult run_triangle(const ExperimentManifest& m);

// Dispatches on m.experiment after validating the manifest.
ExperimentResult run_experiment(const ExperimentManifest& m);

// Writes <out_dir>/<experiment>.csv and <experiment>_<suffix>.csv for each
// extra; returns the paths written.
std::vector<std::string> write_result(const ExperimentResult& result, const ExperimentManifest& m,
                                      const std::string& out_dir);

// Median and mean of each value column over rows sharing the key columns,
// in order of first appearance.
ResultTable summarize(const ResultTable& table, const std::vector<std::string>& keys,
                      const std::vector<std::string>& values);

std::string toolkit_version();

}  // namespace fragile
