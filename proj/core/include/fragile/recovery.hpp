#pragma once

#include <array>
#include <bitset>
#include <span>
#include <vector>

#include "fragile/dct.hpp"
#include "fragile/jpeg.hpp"
#include "fragile/mask.hpp"

namespace fragile {

struct RecoveryBounds {
  double x_min = -128.0;  // level-shifted pixel range
  double x_max = 127.0;
  double y_min = -1024.0;
  double y_max = 1024.0;
};

// One LP instance: the target block plus its direct neighbours (up to 3x3
// blocks, fewer at image borders). Coefficients listed in `free` are
// unknowns; every other coefficient is pinned to `fixed`.
struct RecoveryProblem {
  std::size_t window_rows = 1;  // in blocks
  std::size_t window_cols = 1;
  std::size_t target_row = 0;  // position of the target inside the window
  std::size_t target_col = 0;
  std::vector<Block8> fixed;                // Y*, row-major over window blocks
  std::vector<std::bitset<64>> free;        // unknown subbands per window block
  RecoveryBounds bounds;

  std::size_t free_count() const;
  void validate() const;
};

// Window around block (block_row, block_col). The free set is every subband
// retained by `scope` whose dequantized coefficient is zero.
RecoveryProblem make_recovery_problem(const DctPlane& dequantized, const SubbandMask& scope,
                                      std::size_t block_row, std::size_t block_col,
                                      const RecoveryBounds& bounds = {});

enum class RecoverySolver { piecewise, dense };

struct RecoveryResult {
  Block8 target{};              // recovered coefficients of the target block
  std::vector<Block8> window;   // recovered coefficients of every window block
  double objective = 0.0;       // sum of |x(l) - x(l')| over neighbour pairs
  double zero_objective = 0.0;  // same for the zero completion
  double max_violation = 0.0;   // largest bound violation of the returned point
  double slack_overlap = 0.0;   // largest min(e+, e-) over the slack pairs
  std::size_t iterations = 0;
  std::size_t free_count = 0;
};

// Minimizes the total variation of the window over the free coefficients.
// Throws InfeasibleError if the fixed values conflict with the bounds and
// NumericalError if the iteration cap is hit.
RecoveryResult recover_block(const RecoveryProblem& problem,
                             RecoverySolver solver = RecoverySolver::piecewise,
                             std::size_t max_iterations = 100000);

struct ImageRecovery {
  DctPlane coefficients;
  std::size_t free_coefficients = 0;
  std::size_t infeasible_blocks = 0;  // kept at the zero completion
};

// Solves one problem per block (neighbour coefficients always come from the
// input) and assembles the recovered target blocks.
ImageRecovery recover_image(const DctPlane& dequantized, const SubbandMask& scope,
                            const RecoveryBounds& bounds = {});

// Coefficients that recovery may change: retained by `scope` and zero in
// `dequantized`. One flag per plane sample.
std::vector<bool> recoverable_positions(const DctPlane& dequantized, const SubbandMask& scope);

enum class SignClass { neg = 0, zero = 1, pos = 2 };
SignClass classify_sign(double value, double zero_band);

// Joint fractions, cells[true][predicted] over {neg, zero, pos}.
struct SignContingency {
  std::array<std::array<double, 3>, 3> cells{};
  std::size_t count = 0;

  double diagonal() const { return cells[0][0] + cells[1][1] + cells[2][2]; }
};

inline constexpr double kDefaultZeroBand = 0.25;

// Tabulates every coefficient retained by `mask`.
SignContingency sign_contingency(const DctPlane& recovered, const DctPlane& original,
                                 const SubbandMask& mask, double zero_band = kDefaultZeroBand);
// Tabulates the flagged coefficients only.
SignContingency sign_contingency(const DctPlane& recovered, const DctPlane& original,
                                 const std::vector<bool>& selected,
                                 double zero_band = kDefaultZeroBand);
// Accumulates several tables weighted by their counts.
SignContingency merge_contingency(std::span<const SignContingency> tables);

struct FingerprintDelta {
  double corr_before = 0.0;
  double corr_after = 0.0;
  std::size_t changed_coefficients = 0;
  std::size_t infeasible_blocks = 0;
};

// Mallory estimates a fingerprint from JPEG versions of `images`, once as
// decoded and once after LP recovery of the `scope` band, and correlates the
// `compare` band of each estimate with Alice's fingerprint in that band.
FingerprintDelta recovery_fingerprint_delta(std::span<const ImagePlane> images,
                                            const ImagePlane& fp_alice_band,
                                            const SubbandMask& compare, const SubbandMask& scope,
                                            const QuantTable& table, double sigma0 = 5.0);

}  // namespace fragile
