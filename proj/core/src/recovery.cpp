#include "fragile/recovery.hpp"

#include <algorithm>
#include <cmath>

#include "fragile/fingerprint.hpp"
#include "fragile/lp.hpp"
#include "fragile/parallel.hpp"
#include "fragile/similarity.hpp"

namespace fragile {

namespace {

constexpr double kPenalty = 1e4;  // slope of the bound penalties
constexpr double kFeasTol = 1e-6;

// Pixel values of the window as affine functions of the free coefficients.
struct WindowModel {
  std::size_t height = 0, width = 0;  // pixels
  std::size_t vars = 0;
  std::vector<double> base;                 // x0, row-major over the window
  std::vector<std::size_t> first_var;       // per window block
  std::vector<std::vector<std::size_t>> subbands;  // free subbands per window block

  std::size_t block_of(std::size_t r, std::size_t c, std::size_t window_cols) const {
    return (r / kBlock) * window_cols + c / kBlock;
  }
};

WindowModel build_model(const RecoveryProblem& p) {
  WindowModel w;
  w.height = p.window_rows * kBlock;
  w.width = p.window_cols * kBlock;
  w.base.assign(w.height * w.width, 0.0);
  const std::size_t nb = p.window_rows * p.window_cols;
  w.first_var.resize(nb);
  w.subbands.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    w.first_var[b] = w.vars;
    Block8 pinned = p.fixed[b];
    for (std::size_t s = 0; s < 64; ++s) {
      if (!p.free[b].test(s)) continue;
      w.subbands[b].push_back(s);
      pinned[s] = 0.0;
    }
    w.vars += w.subbands[b].size();
    const Block8 px = idct8(pinned);
    const std::size_t r0 = (b / p.window_cols) * kBlock, c0 = (b % p.window_cols) * kBlock;
    for (std::size_t u = 0; u < kBlock; ++u) {
      for (std::size_t v = 0; v < kBlock; ++v) w.base[(r0 + u) * w.width + c0 + v] = px[u * kBlock + v];
    }
  }
  return w;
}

// Coefficients of pixel (r, c) with respect to all free variables.
void pixel_row(const WindowModel& w, const RecoveryProblem& p, std::size_t r, std::size_t c,
               std::vector<double>& row) {
  std::fill(row.begin(), row.end(), 0.0);
  const std::size_t b = w.block_of(r, c, p.window_cols);
  const auto& basis = dct_basis();
  const std::size_t m = r % kBlock, n = c % kBlock;
  for (std::size_t i = 0; i < w.subbands[b].size(); ++i) {
    const std::size_t s = w.subbands[b][i];
    row[w.first_var[b] + i] = basis[(s / kBlock) * kBlock + m] * basis[(s % kBlock) * kBlock + n];
  }
}

struct PixelPair {
  std::size_t a, b;
};

std::vector<PixelPair> neighbour_pairs(std::size_t h, std::size_t w) {
  std::vector<PixelPair> pairs;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (c + 1 < w) pairs.push_back({r * w + c, r * w + c + 1});
      if (r + 1 < h) pairs.push_back({r * w + c, (r + 1) * w + c});
    }
  }
  return pairs;
}

std::vector<Block8> assemble(const RecoveryProblem& p, const WindowModel& w,
                             const std::vector<double>& y) {
  std::vector<Block8> out = p.fixed;
  for (std::size_t b = 0; b < out.size(); ++b) {
    for (std::size_t i = 0; i < w.subbands[b].size(); ++i) {
      out[b][w.subbands[b][i]] = y.empty() ? 0.0 : y[w.first_var[b] + i];
    }
  }
  return out;
}

std::vector<double> window_pixels(const RecoveryProblem& p, const std::vector<Block8>& coeffs) {
  const std::size_t width = p.window_cols * kBlock;
  std::vector<double> px(p.window_rows * kBlock * width);
  for (std::size_t b = 0; b < coeffs.size(); ++b) {
    const Block8 x = idct8(coeffs[b]);
    const std::size_t r0 = (b / p.window_cols) * kBlock, c0 = (b % p.window_cols) * kBlock;
    for (std::size_t u = 0; u < kBlock; ++u) {
      for (std::size_t v = 0; v < kBlock; ++v) px[(r0 + u) * width + c0 + v] = x[u * kBlock + v];
    }
  }
  return px;
}

double total_variation(const std::vector<double>& px, const std::vector<PixelPair>& pairs) {
  double s = 0.0;
  for (const auto& pr : pairs) s += std::abs(px[pr.a] - px[pr.b]);
  return s;
}

double bound_violation(const RecoveryProblem& p, const std::vector<Block8>& coeffs,
                       const std::vector<double>& px) {
  const auto& bd = p.bounds;
  double worst = 0.0;
  for (double x : px) worst = std::max({worst, bd.x_min - x, x - bd.x_max});
  for (const auto& blk : coeffs) {
    for (double y : blk) worst = std::max({worst, bd.y_min - y, y - bd.y_max});
  }
  return worst;
}

std::vector<double> solve_piecewise(const RecoveryProblem& p, const WindowModel& w,
                                    const std::vector<PixelPair>& pairs, std::size_t max_iterations,
                                    std::size_t& iterations) {
  lp::PiecewiseProblem pw;
  pw.vars = w.vars;
  pw.shapes.push_back({{0.0}, {-1.0, 1.0}});
  pw.shapes.push_back({{p.bounds.x_min, p.bounds.x_max}, {-kPenalty, 0.0, kPenalty}});
  pw.shapes.push_back({{p.bounds.y_min, p.bounds.y_max}, {-kPenalty, 0.0, kPenalty}});

  const std::size_t npx = w.height * w.width;
  std::vector<std::vector<double>> rows(npx, std::vector<double>(w.vars));
  std::vector<bool> has_free(npx, false);
  for (std::size_t r = 0; r < w.height; ++r) {
    for (std::size_t c = 0; c < w.width; ++c) {
      const std::size_t i = r * w.width + c;
      pixel_row(w, p, r, c, rows[i]);
      has_free[i] = !w.subbands[w.block_of(r, c, p.window_cols)].empty();
    }
  }
  std::vector<double> diff(w.vars);
  for (const auto& pr : pairs) {
    if (!has_free[pr.a] && !has_free[pr.b]) continue;  // constant term
    for (std::size_t i = 0; i < w.vars; ++i) diff[i] = rows[pr.a][i] - rows[pr.b][i];
    pw.add_form(diff, w.base[pr.a] - w.base[pr.b], 0);
  }
  for (std::size_t i = 0; i < npx; ++i) {
    if (has_free[i]) pw.add_form(rows[i], w.base[i], 1);
  }
  std::vector<double> unit(w.vars, 0.0);
  for (std::size_t i = 0; i < w.vars; ++i) {
    unit[i] = 1.0;
    pw.add_form(unit, 0.0, 2);
    unit[i] = 0.0;
  }
  const lp::PiecewiseSolution sol = lp::minimize_piecewise(pw, max_iterations);
  iterations = sol.iterations;
  if (sol.status == lp::Status::iteration_limit) {
    throw NumericalError("recovery LP hit the iteration cap");
  }
  if (sol.status != lp::Status::optimal) {
    throw NumericalError(std::string("recovery LP ended ") + lp::to_string(sol.status));
  }
  return sol.y;
}

std::vector<double> solve_dense(const RecoveryProblem& p, const WindowModel& w,
                                const std::vector<PixelPair>& pairs, std::size_t max_iterations,
                                std::size_t& iterations, double& slack_overlap) {
  const std::size_t npx = w.height * w.width, nq = pairs.size(), f = w.vars;
  lp::Problem lp;
  lp.rows = npx + nq;
  lp.cols = f + npx + 2 * nq;
  lp.a.assign(lp.rows * lp.cols, 0.0);
  lp.b.assign(lp.rows, 0.0);
  lp.c.assign(lp.cols, 0.0);
  lp.lower.assign(lp.cols, 0.0);
  lp.upper.assign(lp.cols, lp::kInf);
  for (std::size_t i = 0; i < f; ++i) lp.lower[i] = p.bounds.y_min, lp.upper[i] = p.bounds.y_max;
  for (std::size_t i = 0; i < npx; ++i) {
    lp.lower[f + i] = p.bounds.x_min;
    lp.upper[f + i] = p.bounds.x_max;
  }
  for (std::size_t q = 0; q < 2 * nq; ++q) lp.c[f + npx + q] = 1.0;

  // x_p - sum a_pf y_f = x0_p
  std::vector<double> row(f);
  for (std::size_t r = 0; r < w.height; ++r) {
    for (std::size_t c = 0; c < w.width; ++c) {
      const std::size_t i = r * w.width + c;
      pixel_row(w, p, r, c, row);
      double* out = &lp.a[i * lp.cols];
      for (std::size_t k = 0; k < f; ++k) out[k] = -row[k];
      out[f + i] = 1.0;
      lp.b[i] = w.base[i];
    }
  }
  // x_a - x_b - e+ + e- = 0
  for (std::size_t q = 0; q < nq; ++q) {
    double* out = &lp.a[(npx + q) * lp.cols];
    out[f + pairs[q].a] = 1.0;
    out[f + pairs[q].b] = -1.0;
    out[f + npx + q] = -1.0;
    out[f + npx + nq + q] = 1.0;
  }
  // Start from the zero completion.
  lp.start.assign(lp.cols, 0.0);
  for (std::size_t i = 0; i < npx; ++i) lp.start[f + i] = w.base[i];
  for (std::size_t q = 0; q < nq; ++q) {
    const double d = w.base[pairs[q].a] - w.base[pairs[q].b];
    lp.start[f + npx + q] = std::max(0.0, d);
    lp.start[f + npx + nq + q] = std::max(0.0, -d);
  }
  const lp::Solution sol = lp::solve_bounded_simplex(lp, max_iterations);
  iterations = sol.iterations;
  if (sol.status == lp::Status::infeasible) throw InfeasibleError("recovery LP is infeasible");
  if (sol.status != lp::Status::optimal) {
    throw NumericalError(std::string("recovery LP ended ") + lp::to_string(sol.status));
  }
  slack_overlap = 0.0;
  for (std::size_t q = 0; q < nq; ++q) {
    slack_overlap = std::max(slack_overlap, std::min(sol.x[f + npx + q], sol.x[f + npx + nq + q]));
  }
  return {sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(f)};
}

}  // namespace

std::size_t RecoveryProblem::free_count() const {
  std::size_t n = 0;
  for (const auto& f : free) n += f.count();
  return n;
}

void RecoveryProblem::validate() const {
  if (window_rows == 0 || window_rows > 3 || window_cols == 0 || window_cols > 3) {
    throw ParameterError("recovery window must span 1 to 3 blocks per side");
  }
  if (target_row >= window_rows || target_col >= window_cols) {
    throw ParameterError("recovery target lies outside the window");
  }
  if (fixed.size() != window_rows * window_cols || free.size() != fixed.size()) {
    throw ParameterError("recovery window block count mismatch");
  }
  if (!(bounds.x_min < bounds.x_max) || !(bounds.y_min < bounds.y_max)) {
    throw ParameterError("recovery bounds are empty");
  }
}

RecoveryProblem make_recovery_problem(const DctPlane& dequantized, const SubbandMask& scope,
                                      std::size_t block_row, std::size_t block_col,
                                      const RecoveryBounds& bounds) {
  if (block_row >= dequantized.blocks_down() || block_col >= dequantized.blocks_across()) {
    throw ParameterError("block index outside the image");
  }
  RecoveryProblem p;
  const std::size_t r0 = block_row > 0 ? block_row - 1 : 0;
  const std::size_t c0 = block_col > 0 ? block_col - 1 : 0;
  const std::size_t r1 = std::min(block_row + 1, dequantized.blocks_down() - 1);
  const std::size_t c1 = std::min(block_col + 1, dequantized.blocks_across() - 1);
  p.window_rows = r1 - r0 + 1;
  p.window_cols = c1 - c0 + 1;
  p.target_row = block_row - r0;
  p.target_col = block_col - c0;
  p.bounds = bounds;
  for (std::size_t br = r0; br <= r1; ++br) {
    for (std::size_t bc = c0; bc <= c1; ++bc) {
      const Block8 y = load_block(dequantized, br, bc);
      std::bitset<64> f;
      for (std::size_t s = 0; s < 64; ++s) f.set(s, scope.retained(s) && y[s] == 0.0);
      p.fixed.push_back(y);
      p.free.push_back(f);
    }
  }
  return p;
}

RecoveryResult recover_block(const RecoveryProblem& problem, RecoverySolver solver,
                             std::size_t max_iterations) {
  problem.validate();
  const WindowModel w = build_model(problem);
  const auto pairs = neighbour_pairs(w.height, w.width);
  RecoveryResult res;
  res.free_count = w.vars;

  // Fixed data must respect the bounds on its own.
  for (std::size_t b = 0; b < problem.fixed.size(); ++b) {
    for (std::size_t s = 0; s < 64; ++s) {
      if (problem.free[b].test(s)) continue;
      const double y = problem.fixed[b][s];
      if (y < problem.bounds.y_min - kFeasTol || y > problem.bounds.y_max + kFeasTol) {
        throw InfeasibleError("fixed coefficient outside the coefficient bounds");
      }
    }
    if (problem.free[b].none()) {
      const std::size_t r0 = (b / problem.window_cols) * kBlock, c0 = (b % problem.window_cols) * kBlock;
      for (std::size_t u = 0; u < kBlock; ++u) {
        for (std::size_t v = 0; v < kBlock; ++v) {
          const double x = w.base[(r0 + u) * w.width + c0 + v];
          if (x < problem.bounds.x_min - kFeasTol || x > problem.bounds.x_max + kFeasTol) {
            throw InfeasibleError("fully fixed block has pixels outside the bounds");
          }
        }
      }
    }
  }

  const auto zero = assemble(problem, w, {});
  res.zero_objective = total_variation(window_pixels(problem, zero), pairs);

  std::vector<double> y;
  if (w.vars > 0) {
    y = solver == RecoverySolver::piecewise
            ? solve_piecewise(problem, w, pairs, max_iterations, res.iterations)
            : solve_dense(problem, w, pairs, max_iterations, res.iterations, res.slack_overlap);
  }
  res.window = assemble(problem, w, y);
  const auto px = window_pixels(problem, res.window);
  res.objective = total_variation(px, pairs);
  res.max_violation = bound_violation(problem, res.window, px);
  if (res.max_violation > kFeasTol) {
    throw InfeasibleError("no completion of the free coefficients satisfies the bounds");
  }
  res.target = res.window[problem.target_row * problem.window_cols + problem.target_col];
  return res;
}

ImageRecovery recover_image(const DctPlane& dequantized, const SubbandMask& scope,
                            const RecoveryBounds& bounds) {
  ImageRecovery out;
  out.coefficients = dequantized;
  const std::size_t across = dequantized.blocks_across();
  const std::size_t n = dequantized.block_count();
  std::vector<Block8> recovered(n);
  std::vector<char> infeasible(n, 0);
  std::vector<std::size_t> free(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const std::size_t br = i / across, bc = i % across;
    const RecoveryProblem p = make_recovery_problem(dequantized, scope, br, bc, bounds);
    free[i] = p.free[p.target_row * p.window_cols + p.target_col].count();
    try {
      recovered[i] = recover_block(p).target;
    } catch (const InfeasibleError&) {
      recovered[i] = load_block(dequantized, br, bc);
      infeasible[i] = 1;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    store_block(out.coefficients, i / across, i % across, recovered[i]);
    out.infeasible_blocks += static_cast<std::size_t>(infeasible[i]);
    out.free_coefficients += free[i];
  }
  return out;
}

std::vector<bool> recoverable_positions(const DctPlane& dequantized, const SubbandMask& scope) {
  std::vector<bool> out(dequantized.size());
  for (std::size_t r = 0; r < dequantized.height(); ++r) {
    for (std::size_t c = 0; c < dequantized.width(); ++c) {
      const std::size_t s = (r % kBlock) * kBlock + c % kBlock;
      out[r * dequantized.width() + c] = scope.retained(s) && dequantized(r, c) == 0.0;
    }
  }
  return out;
}

SignClass classify_sign(double value, double zero_band) {
  if (value < -zero_band) return SignClass::neg;
  if (value > zero_band) return SignClass::pos;
  return SignClass::zero;
}

SignContingency sign_contingency(const DctPlane& recovered, const DctPlane& original,
                                 const std::vector<bool>& selected, double zero_band) {
  require_same_shape(recovered, original, "sign contingency");
  if (selected.size() != recovered.size()) throw ShapeError("selection length mismatch");
  if (!(zero_band >= 0.0)) throw ParameterError("zero band must be nonnegative");
  SignContingency t;
  std::array<std::array<std::size_t, 3>, 3> counts{};
  for (std::size_t i = 0; i < recovered.size(); ++i) {
    if (!selected[i]) continue;
    const auto truth = static_cast<std::size_t>(classify_sign(original[i], zero_band));
    const auto pred = static_cast<std::size_t>(classify_sign(recovered[i], zero_band));
    ++counts[truth][pred];
    ++t.count;
  }
  if (t.count == 0) return t;
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      t.cells[a][b] = static_cast<double>(counts[a][b]) / static_cast<double>(t.count);
    }
  }
  return t;
}

SignContingency sign_contingency(const DctPlane& recovered, const DctPlane& original,
                                 const SubbandMask& mask, double zero_band) {
  std::vector<bool> selected(recovered.size());
  for (std::size_t r = 0; r < recovered.height(); ++r) {
    for (std::size_t c = 0; c < recovered.width(); ++c) {
      selected[r * recovered.width() + c] = mask.retained((r % kBlock) * kBlock + c % kBlock);
    }
  }
  return sign_contingency(recovered, original, selected, zero_band);
}

SignContingency merge_contingency(std::span<const SignContingency> tables) {
  SignContingency out;
  for (const auto& t : tables) out.count += t.count;
  if (out.count == 0) return out;
  for (const auto& t : tables) {
    const double w = static_cast<double>(t.count) / static_cast<double>(out.count);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) out.cells[a][b] += w * t.cells[a][b];
    }
  }
  return out;
}

FingerprintDelta recovery_fingerprint_delta(std::span<const ImagePlane> images,
                                            const ImagePlane& fp_alice_band,
                                            const SubbandMask& compare, const SubbandMask& scope,
                                            const QuantTable& table, double sigma0) {
  if (images.empty()) throw ParameterError("recovery needs at least one image");
  std::vector<ImagePlane> before(images.size()), after(images.size());
  std::vector<std::size_t> changed(images.size()), infeasible(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const DctPlane dq = jpeg_compress(images[i], table);
    const ImageRecovery rec = recover_image(dq, scope);
    before[i] = jpeg_decode(dq);
    after[i] = jpeg_decode(rec.coefficients);
    for (std::size_t k = 0; k < dq.size(); ++k) changed[i] += dq[k] != rec.coefficients[k];
    infeasible[i] = rec.infeasible_blocks;
  }
  FingerprintDelta out;
  const Fingerprint k_before = estimate_fingerprint_ml(before, sigma0);
  const Fingerprint k_after = estimate_fingerprint_ml(after, sigma0);
  out.corr_before = ncc(apply_mask(k_before.plane, compare), fp_alice_band);
  out.corr_after = ncc(apply_mask(k_after.plane, compare), fp_alice_band);
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.changed_coefficients += changed[i];
    out.infeasible_blocks += infeasible[i];
  }
  return out;
}

}  // namespace fragile
