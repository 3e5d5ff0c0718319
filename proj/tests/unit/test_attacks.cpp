#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "fragile/attacks.hpp"
#include "fragile/error.hpp"
#include "fragile/fingerprint.hpp"
#include "fragile/jpeg.hpp"
#include "fragile/lp.hpp"
#include "fragile/recovery.hpp"
#include "fragile/sensor_sim.hpp"
#include "oracles.hpp"

using namespace fragile;

namespace {

// Best basic feasible solution by enumerating every column subset of size m.
double vertex_enumeration(const lp::Problem& p) {
  const std::size_t m = p.rows, n = p.cols;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(n, 0);
  std::fill(pick.end() - static_cast<std::ptrdiff_t>(m), pick.end(), 1);
  do {
    std::vector<std::size_t> cols;
    for (std::size_t j = 0; j < n; ++j) {
      if (pick[j]) cols.push_back(j);
    }
    // Solve the m x m system by Gaussian elimination.
    std::vector<double> a(m * (m + 1));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < m; ++k) a[i * (m + 1) + k] = p.a[i * n + cols[k]];
      a[i * (m + 1) + m] = p.b[i];
    }
    bool singular = false;
    for (std::size_t c = 0; c < m && !singular; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m; ++r) {
        if (std::abs(a[r * (m + 1) + c]) > std::abs(a[piv * (m + 1) + c])) piv = r;
      }
      if (std::abs(a[piv * (m + 1) + c]) < 1e-12) {
        singular = true;
        break;
      }
      for (std::size_t k = 0; k <= m; ++k) std::swap(a[c * (m + 1) + k], a[piv * (m + 1) + k]);
      for (std::size_t r = 0; r < m; ++r) {
        if (r == c) continue;
        const double f = a[r * (m + 1) + c] / a[c * (m + 1) + c];
        for (std::size_t k = 0; k <= m; ++k) a[r * (m + 1) + k] -= f * a[c * (m + 1) + k];
      }
    }
    if (singular) continue;
    double obj = 0.0;
    bool feasible = true;
    for (std::size_t k = 0; k < m; ++k) {
      const double x = a[k * (m + 1) + m] / a[k * (m + 1) + k];
      if (x < -1e-9) feasible = false;
      obj += p.c[cols[k]] * x;
    }
    if (feasible) best = std::min(best, obj);
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

lp::Problem random_standard_lp(std::uint64_t seed, std::size_t m, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.1, 1.0);
  lp::Problem p;
  p.rows = m;
  p.cols = n;
  // A feasible point x0 > 0 and a positive cost keep the problem bounded.
  std::vector<double> x0(n);
  for (double& v : x0) v = pos(rng);
  for (std::size_t i = 0; i < m * n; ++i) p.a.push_back(u(rng));
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += p.a[i * n + j] * x0[j];
    p.b.push_back(s);
  }
  for (std::size_t j = 0; j < n; ++j) p.c.push_back(pos(rng) + 0.2 * u(rng));
  p.lower.assign(n, 0.0);
  p.upper.assign(n, lp::kInf);
  return p;
}

ImagePlane capture_textured(std::size_t size, std::uint64_t seed) {
  const auto cam = sim::new_camera(0.01, 2.0, seed, size, size);
  sim::SceneSpec s;
  s.kind = sim::SceneKind::textured;
  s.height = s.width = size;
  return sim::capture(cam, sim::render_scene(s, seed), seed);
}

}  // namespace

TEST(CopyAttack, EmbedsScaledFingerprint) {
  const ImagePlane j(16, 16, 100.0);
  const ImagePlane k = oracle::random_plane(16, 16, 1, 0.01);
  const ImagePlane out = copy_attack(j, k, {0.5, true});
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], 100.0 * (1.0 + 0.5 * k[i]), 1e-12);
  EXPECT_EQ(copy_attack(j, k, {0.0, true}), j);
}

TEST(CopyAttack, ClampingAndValidation) {
  const ImagePlane j(16, 16, 250.0);
  const ImagePlane k(16, 16, 1.0);
  const ImagePlane clamped = copy_attack(j, k, {1.0, true});
  for (double v : clamped.values()) EXPECT_EQ(v, 255.0);
  const ImagePlane raw = copy_attack(j, k, {1.0, false});
  for (double v : raw.values()) EXPECT_EQ(v, 500.0);
  EXPECT_THROW(copy_attack(j, k, {-1.0, true}), ParameterError);
  EXPECT_THROW(copy_attack(j, ImagePlane(8, 8, 0.0), {1.0, true}), ShapeError);
}

TEST(CopyAttack, LogGrid) {
  const auto g = log_grid(1e-3, 1e2, 40);
  ASSERT_EQ(g.size(), 40u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-3);
  EXPECT_NEAR(g.back(), 1e2, 1e-12);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], g[1] / g[0], 1e-12);
  EXPECT_THROW(log_grid(0.0, 1.0, 3), ParameterError);
}

TEST(DenseSimplex, TextbookCases) {
  // min -x - y  s.t. x + y + s = 4, x <= 3.
  lp::Problem p;
  p.rows = 1;
  p.cols = 3;
  p.a = {1, 1, 1};
  p.b = {4};
  p.c = {-1, -1, 0};
  p.lower = {0, 0, 0};
  p.upper = {3, lp::kInf, lp::kInf};
  const lp::Solution s = lp::solve_bounded_simplex(p);
  ASSERT_EQ(s.status, lp::Status::optimal);
  EXPECT_NEAR(s.objective, -4.0, 1e-9);

  lp::Problem bad = p;
  bad.b = {-1};
  EXPECT_EQ(lp::solve_bounded_simplex(bad).status, lp::Status::infeasible);

  lp::Problem open;
  open.rows = 1;
  open.cols = 2;
  open.a = {1, -1};
  open.b = {0};
  open.c = {-1, 0};
  open.lower = {0, 0};
  open.upper = {lp::kInf, lp::kInf};
  EXPECT_EQ(lp::solve_bounded_simplex(open).status, lp::Status::unbounded);
}

TEST(DenseSimplex, MatchesVertexEnumeration) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const lp::Problem p = random_standard_lp(seed, 3, 7);
    const lp::Solution s = lp::solve_bounded_simplex(p);
    ASSERT_EQ(s.status, lp::Status::optimal) << "seed " << seed;
    EXPECT_NEAR(s.objective, vertex_enumeration(p), 1e-8) << "seed " << seed;
    for (std::size_t i = 0; i < p.rows; ++i) {
      double r = -p.b[i];
      for (std::size_t j = 0; j < p.cols; ++j) r += p.a[i * p.cols + j] * s.x[j];
      EXPECT_NEAR(r, 0.0, 1e-9);
    }
    for (double x : s.x) EXPECT_GE(x, -1e-9);
  }
}

TEST(PiecewiseSimplex, WeightedMedian) {
  // sum_k |y - a_k| is minimized at the median.
  const std::vector<double> a{3.0, -1.0, 7.5, 2.0, 10.0, 4.0, 0.5};
  lp::PiecewiseProblem p;
  p.vars = 1;
  p.shapes.push_back({{0.0}, {-1.0, 1.0}});
  for (double v : a) p.add_form({1.0}, -v, 0);
  const lp::PiecewiseSolution s = lp::minimize_piecewise(p);
  ASSERT_EQ(s.status, lp::Status::optimal);
  std::vector<double> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_NEAR(s.y[0], sorted[3], 1e-9);
  EXPECT_NEAR(s.objective, p.evaluate({sorted[3]}), 1e-12);
}

TEST(PiecewiseSimplex, MatchesDenseRouteOnRandomL1Fits) {
  // min sum_k |r_k . y - b_k| with a box penalty, solved both ways.
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n = 4, m = 15;
    lp::PiecewiseProblem pw;
    pw.vars = n;
    pw.shapes.push_back({{0.0}, {-1.0, 1.0}});
    std::vector<std::vector<double>> rows(m, std::vector<double>(n));
    std::vector<double> b(m);
    for (std::size_t k = 0; k < m; ++k) {
      for (double& v : rows[k]) v = g(rng);
      b[k] = g(rng);
      pw.add_form(rows[k], -b[k], 0);
    }
    const lp::PiecewiseSolution ps = lp::minimize_piecewise(pw);
    ASSERT_EQ(ps.status, lp::Status::optimal);

    // Dense form: r_k . (y+ - y-) - b_k = e+_k - e-_k, minimize sum e.
    lp::Problem d;
    d.rows = m;
    d.cols = 2 * n + 2 * m;
    d.a.assign(d.rows * d.cols, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        d.a[k * d.cols + i] = rows[k][i];
        d.a[k * d.cols + n + i] = -rows[k][i];
      }
      d.a[k * d.cols + 2 * n + k] = -1.0;
      d.a[k * d.cols + 2 * n + m + k] = 1.0;
      d.b.push_back(b[k]);
    }
    d.c.assign(d.cols, 0.0);
    for (std::size_t k = 0; k < 2 * m; ++k) d.c[2 * n + k] = 1.0;
    d.lower.assign(d.cols, 0.0);
    d.upper.assign(d.cols, lp::kInf);
    const lp::Solution ds = lp::solve_bounded_simplex(d);
    ASSERT_EQ(ds.status, lp::Status::optimal);
    EXPECT_NEAR(ps.objective, ds.objective, 1e-9) << "seed " << seed;
  }
}

TEST(PiecewiseSimplex, RejectsNonConvexShape) {
  lp::PiecewiseProblem p;
  p.vars = 1;
  p.shapes.push_back({{0.0}, {1.0, -1.0}});
  p.add_form({1.0}, 0.0, 0);
  EXPECT_THROW(lp::minimize_piecewise(p), ParameterError);
}

TEST(Recovery, ProblemPartitionsEverySubband) {
  const ImagePlane img = capture_textured(64, 1);
  const DctPlane dq = jpeg_compress(img, quant_table_for_quality(90));
  const SubbandMask scope = build_mask(1);
  const RecoveryProblem p = make_recovery_problem(dq, scope, 0, 3);
  EXPECT_EQ(p.window_rows, 2u);
  EXPECT_EQ(p.window_cols, 3u);
  EXPECT_EQ(p.target_row, 0u);
  EXPECT_EQ(p.target_col, 1u);
  for (std::size_t b = 0; b < p.fixed.size(); ++b) {
    for (std::size_t s = 0; s < 64; ++s) {
      if (p.free[b].test(s)) {
        EXPECT_TRUE(scope.retained(s));
        EXPECT_EQ(p.fixed[b][s], 0.0);
      }
    }
  }
  EXPECT_THROW(make_recovery_problem(dq, scope, 8, 0), ParameterError);
}

TEST(Recovery, OptimalityCertificateAndDualRoute) {
  const ImagePlane img = capture_textured(64, 2);
  for (int quality : {100, 95, 90}) {
    const DctPlane dq = jpeg_compress(img, quant_table_for_quality(quality));
    for (const SubbandMask& scope : {build_mask(1), build_mask(3)}) {
      const RecoveryProblem p = make_recovery_problem(dq, scope, 3, 4);
      const RecoveryResult fast = recover_block(p);
      EXPECT_LE(fast.max_violation, 1e-6);
      EXPECT_LE(fast.objective, fast.zero_objective + 1e-9);
      for (std::size_t b = 0; b < p.fixed.size(); ++b) {
        for (std::size_t s = 0; s < 64; ++s) {
          if (!p.free[b].test(s)) {
            EXPECT_EQ(fast.window[b][s], p.fixed[b][s]);
          }
        }
      }
      if (p.free_count() <= 120) {
        const RecoveryResult slow = recover_block(p, RecoverySolver::dense);
        EXPECT_NEAR(fast.objective, slow.objective, 1e-9 * std::max(1.0, slow.objective));
        EXPECT_LE(slow.max_violation, 1e-6);
      }
    }
  }
}

TEST(Recovery, SmallWindowsAgreeAcrossSolvers) {
  const ImagePlane img = capture_textured(64, 3);
  for (int quality : {95, 75}) {
    const DctPlane dq = jpeg_compress(img, quant_table_for_quality(quality));
    for (const SubbandMask& scope : {build_mask(1), build_low_mask(1)}) {
      const RecoveryProblem p = make_recovery_problem(dq, scope, 0, 0);  // 2x2 corner window
      const RecoveryResult a = recover_block(p);
      const RecoveryResult b = recover_block(p, RecoverySolver::dense);
      EXPECT_NEAR(a.objective, b.objective, 1e-9 * std::max(1.0, b.objective));
    }
  }
}

TEST(Recovery, NothingFreeMeansNothingChanges) {
  const ImagePlane img = capture_textured(64, 4);
  const DctPlane dq = jpeg_compress(img, quant_table_for_quality(90));
  const ImageRecovery rec = recover_image(dq, SubbandMask::none());
  EXPECT_EQ(rec.free_coefficients, 0u);
  EXPECT_EQ(rec.coefficients, dq);

  // Zero free coefficients concentrates the contingency on the diagonal.
  const SignContingency t = sign_contingency(rec.coefficients, dq, SubbandMask::all());
  EXPECT_NEAR(t.diagonal(), 1.0, 1e-12);
}

TEST(Recovery, InconsistentBoundsAreInfeasible) {
  const ImagePlane img = capture_textured(64, 5);
  const DctPlane dq = jpeg_compress(img, quant_table_for_quality(90));
  RecoveryBounds tight;
  tight.y_min = -1.0;
  tight.y_max = 1.0;
  const RecoveryProblem p = make_recovery_problem(dq, build_mask(1), 2, 2, tight);
  EXPECT_THROW(recover_block(p), InfeasibleError);
}

TEST(SignContingency, TrivialTables) {
  DctPlane a(8, 8), neg(8, 8);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.1 * std::sin(static_cast<double>(i));
  const SignContingency same = sign_contingency(a, a, SubbandMask::all());
  EXPECT_NEAR(same.cells[1][1], 1.0, 1e-12);
  EXPECT_EQ(same.count, 64u);

  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = (i % 2 ? 1.0 : -1.0) * (1.0 + static_cast<double>(i));
    neg[i] = -a[i];
  }
  const SignContingency flipped = sign_contingency(neg, a, SubbandMask::all());
  EXPECT_NEAR(flipped.cells[0][2] + flipped.cells[2][0], 1.0, 1e-12);
  EXPECT_NEAR(flipped.diagonal(), 0.0, 1e-12);
  EXPECT_EQ(classify_sign(0.25, 0.25), SignClass::zero);
  EXPECT_EQ(classify_sign(-0.26, 0.25), SignClass::neg);
}

TEST(SignContingency, MergeWeightsByCount) {
  SignContingency a, b;
  a.cells[0][0] = 1.0;
  a.count = 1;
  b.cells[2][2] = 1.0;
  b.count = 3;
  const std::vector<SignContingency> both{a, b};
  const SignContingency m = merge_contingency(both);
  EXPECT_EQ(m.count, 4u);
  EXPECT_NEAR(m.cells[0][0], 0.25, 1e-12);
  EXPECT_NEAR(m.cells[2][2], 0.75, 1e-12);
}

TEST(Recovery, FingerprintDeltaWithoutFreeCoefficientsIsExact) {
  const auto cam = sim::new_camera(0.01, 2.0, 7, 64, 64);
  sim::SceneSpec s;
  s.kind = sim::SceneKind::textured;
  s.height = s.width = 64;
  std::vector<ImagePlane> imgs;
  for (std::uint64_t i = 0; i < 2; ++i) imgs.push_back(sim::capture(cam, sim::render_scene(s, i), i));
  const ImagePlane k_band = apply_mask(cam.prnu, build_mask(1));
  const FingerprintDelta d =
      recovery_fingerprint_delta(imgs, k_band, build_mask(1), SubbandMask::none(), quant_table_for_quality(95));
  EXPECT_EQ(d.changed_coefficients, 0u);
  EXPECT_EQ(d.corr_before, d.corr_after);
}

TEST(Recovery, HighBandRecoveryDoesNotHelpMallory) {
  const auto cam = sim::new_camera(0.01, 2.0, 8, 64, 64);
  sim::SceneSpec s;
  s.kind = sim::SceneKind::textured;
  s.height = s.width = 64;
  std::vector<ImagePlane> imgs;
  for (std::uint64_t i = 0; i < 2; ++i) imgs.push_back(sim::capture(cam, sim::render_scene(s, 10 + i), i));
  const ImagePlane k_band = apply_mask(cam.prnu, build_mask(1));
  const FingerprintDelta d =
      recovery_fingerprint_delta(imgs, k_band, build_mask(1), build_mask(1), quant_table_for_quality(95));
  EXPECT_GT(d.changed_coefficients, 0u);
  EXPECT_LE(d.corr_after, d.corr_before + 0.01);
}
