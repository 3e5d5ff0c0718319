#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace fragile::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status { optimal, infeasible, unbounded, iteration_limit };
const char* to_string(Status s);

// minimize c^T x subject to A x = b and lower <= x <= upper. Bounds may be
// infinite. A is dense, row-major.
struct Problem {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> lower;
  std::vector<double> upper;
  // Optional starting values for the structural variables (clamped to their
  // bounds); 0 otherwise.
  std::vector<double> start;
};

struct Solution {
  Status status = Status::iteration_limit;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
};

// Two-phase bounded-variable primal simplex on a dense tableau. Pricing is
// most-negative reduced cost; after a run of degenerate pivots it switches to
// Bland's rule until progress resumes. Intended for small problems.
Solution solve_bounded_simplex(const Problem& problem, std::size_t max_iterations = 200000);

// Convex piecewise-linear function: slopes[i] applies between
// breakpoints[i - 1] and breakpoints[i]; slopes.size() == breakpoints.size() + 1.
struct PiecewiseLinear {
  std::vector<double> breakpoints;
  std::vector<double> slopes;

  double operator()(double v) const;
};

// minimize sum_k shapes[shape[k]](offsets[k] + rows[k] . y) over y in R^n.
// Every direction must eventually be penalized (e.g. by bound forms on each
// variable), otherwise the problem is reported unbounded.
struct PiecewiseProblem {
  std::size_t vars = 0;
  std::vector<double> rows;  // forms x vars, row-major
  std::vector<double> offsets;
  std::vector<std::uint32_t> shape;
  std::vector<PiecewiseLinear> shapes;

  std::size_t forms() const { return offsets.size(); }
  void add_form(const std::vector<double>& row, double offset, std::uint32_t shape_index);
  double evaluate(const std::vector<double>& y) const;
};

struct PiecewiseSolution {
  Status status = Status::iteration_limit;
  std::vector<double> y;
  double objective = 0.0;
  std::size_t iterations = 0;
};

// Vertex-following simplex for convex piecewise-linear objectives. The basis
// is a set of `vars` forms pinned at breakpoints; each step leaves one of them
// in a descent direction and takes the longest step along which the
// objective keeps decreasing, so several breakpoints may be passed at once.
// Form offsets are perturbed by a tiny deterministic amount while pivoting so
// that vertices are nondegenerate; the final basis is evaluated with the
// original offsets.
PiecewiseSolution minimize_piecewise(const PiecewiseProblem& problem,
                                     std::size_t max_iterations = 100000);

}  // namespace fragile::lp
