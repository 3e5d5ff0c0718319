#include "fragile/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fragile/error.hpp"

namespace fragile::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Dense bounded-variable simplex

namespace {

enum class VarState : std::uint8_t { basic, lower, upper, between };

class DenseSimplex {
 public:
  explicit DenseSimplex(const Problem& p) : m_(p.rows), n_(p.cols), total_(p.cols + p.rows) {
    lower_ = p.lower;
    upper_ = p.upper;
    lower_.resize(total_, 0.0);
    upper_.resize(total_, kInf);
    value_.assign(total_, 0.0);
    state_.assign(total_, VarState::lower);
    for (std::size_t j = 0; j < n_; ++j) {
      const double hint = p.start.empty() ? 0.0 : p.start[j];
      value_[j] = std::clamp(hint, lower_[j], upper_[j]);
      if (value_[j] == lower_[j]) {
        state_[j] = VarState::lower;
      } else if (value_[j] == upper_[j]) {
        state_[j] = VarState::upper;
      } else {
        state_[j] = VarState::between;
      }
    }
    // Artificial i carries the residual of row i with the sign that makes it
    // nonnegative; the starting basis is the (signed) identity.
    tableau_.assign(m_ * total_, 0.0);
    basic_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double r = p.b[i];
      for (std::size_t j = 0; j < n_; ++j) r -= p.a[i * n_ + j] * value_[j];
      const double sign = r >= 0.0 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < n_; ++j) tableau_[i * total_ + j] = sign * p.a[i * n_ + j];
      tableau_[i * total_ + n_ + i] = 1.0;
      basic_[i] = n_ + i;
      value_[n_ + i] = std::abs(r);
      state_[n_ + i] = VarState::basic;
      rhs_.push_back(sign * p.b[i]);
    }
    original_ = tableau_;
  }

  // With feasibility_target >= 0 the run also ends as soon as the artificial
  // sum drops to that level (phase one).
  Status run(const std::vector<double>& cost, std::size_t max_iterations, std::size_t& iterations,
             double feasibility_target = -1.0) {
    std::vector<double> reduced(total_);
    while (true) {
      if (feasibility_target >= 0.0 && artificial_sum() <= feasibility_target) return Status::optimal;
      if (iterations >= max_iterations) return Status::iteration_limit;
      for (std::size_t j = 0; j < total_; ++j) {
        if (state_[j] == VarState::basic) {
          reduced[j] = 0.0;
          continue;
        }
        double d = cost[j];
        for (std::size_t i = 0; i < m_; ++i) d -= cost[basic_[i]] * tableau_[i * total_ + j];
        reduced[j] = d;
      }
      const bool bland = degenerate_run_ >= kBlandAfter;
      std::size_t enter = total_;
      double dir = 0.0, best = 0.0;
      for (std::size_t j = 0; j < total_; ++j) {
        const double d = reduced[j];
        double want = 0.0;
        switch (state_[j]) {
          case VarState::lower:
            if (d < -kTol && upper_[j] > lower_[j]) want = 1.0;
            break;
          case VarState::upper:
            if (d > kTol && upper_[j] > lower_[j]) want = -1.0;
            break;
          case VarState::between:
            if (std::abs(d) > kTol) want = d < 0.0 ? 1.0 : -1.0;
            break;
          case VarState::basic: break;
        }
        if (want == 0.0) continue;
        if (bland) {
          enter = j, dir = want;
          break;
        }
        if (std::abs(d) > best) enter = j, dir = want, best = std::abs(d);
      }
      if (enter == total_) return Status::optimal;

      // Two-pass ratio test: the bound step with relaxed bounds, then the
      // largest pivot among rows blocking within it.
      double step = dir > 0.0 ? upper_[enter] - value_[enter] : value_[enter] - lower_[enter];
      double relaxed = step;
      for (std::size_t i = 0; i < m_; ++i) {
        const double alpha = dir * tableau_[i * total_ + enter];
        const std::size_t b = basic_[i];
        if (alpha > kPivotTol && std::isfinite(lower_[b])) {
          relaxed = std::min(relaxed, (value_[b] - lower_[b] + kFeasTol) / alpha);
        } else if (alpha < -kPivotTol && std::isfinite(upper_[b])) {
          relaxed = std::min(relaxed, (upper_[b] - value_[b] + kFeasTol) / -alpha);
        }
      }
      std::size_t leave_row = m_;
      VarState leave_state = VarState::lower;
      double leave_alpha = 0.0;
      if (relaxed < step) {
        for (std::size_t i = 0; i < m_; ++i) {
          const double alpha = dir * tableau_[i * total_ + enter];
          const std::size_t b = basic_[i];
          double limit = kInf;
          VarState hit = VarState::lower;
          if (alpha > kPivotTol && std::isfinite(lower_[b])) {
            limit = (value_[b] - lower_[b]) / alpha;
          } else if (alpha < -kPivotTol && std::isfinite(upper_[b])) {
            limit = (upper_[b] - value_[b]) / -alpha;
            hit = VarState::upper;
          }
          if (limit > relaxed) continue;
          const bool take = leave_row == m_ ||
                            (bland ? b < basic_[leave_row] : std::abs(alpha) > leave_alpha);
          if (take) leave_row = i, leave_state = hit, leave_alpha = std::abs(alpha);
        }
        const double alpha = dir * tableau_[leave_row * total_ + enter];
        const std::size_t b = basic_[leave_row];
        step = leave_state == VarState::lower ? (value_[b] - lower_[b]) / alpha
                                              : (upper_[b] - value_[b]) / -alpha;
        step = std::max(step, 0.0);
      }
      if (!std::isfinite(step)) return Status::unbounded;
      ++iterations;

      for (std::size_t i = 0; i < m_; ++i) {
        value_[basic_[i]] -= dir * tableau_[i * total_ + enter] * step;
      }
      value_[enter] += dir * step;
      degenerate_run_ = step <= 0.0 ? degenerate_run_ + 1 : 0;
      if (leave_row == m_) {
        state_[enter] = dir > 0.0 ? VarState::upper : VarState::lower;
        value_[enter] = dir > 0.0 ? upper_[enter] : lower_[enter];
        continue;
      }
      const std::size_t leaving = basic_[leave_row];
      state_[leaving] = leave_state;
      value_[leaving] = leave_state == VarState::lower ? lower_[leaving] : upper_[leaving];
      pivot(leave_row, enter);
      basic_[leave_row] = enter;
      state_[enter] = VarState::basic;
      if (++since_refactor_ >= kRefactorEvery) refactor();
    }
  }

  double artificial_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < m_; ++i) s += value_[n_ + i];
    return s;
  }

  // Fixes artificials at zero and pivots the basic ones out where a
  // structural column can replace them; rows where none can are redundant.
  void retire_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      upper_[n_ + i] = 0.0;
      value_[n_ + i] = 0.0;
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (basic_[r] < n_) continue;
      std::size_t col = n_;
      double best = kPivotTol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (state_[j] == VarState::basic) continue;
        const double a = std::abs(tableau_[r * total_ + j]);
        if (a > best) best = a, col = j;
      }
      if (col == n_) continue;
      const std::size_t leaving = basic_[r];
      state_[leaving] = VarState::lower;
      pivot(r, col);
      basic_[r] = col;
      state_[col] = VarState::basic;
    }
    refactor();
  }

  std::size_t total() const { return total_; }
  const std::vector<double>& values() const { return value_; }

 private:
  static constexpr double kTol = 1e-9;
  static constexpr double kPivotTol = 1e-9;
  static constexpr double kFeasTol = 1e-9;
  static constexpr std::size_t kBlandAfter = 50;
  static constexpr std::size_t kRefactorEvery = 50;

  // Rebuilds the tableau and the basic values from the original columns.
  void refactor() {
    since_refactor_ = 0;
    std::vector<double> basis(m_ * m_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t k = 0; k < m_; ++k) basis[i * m_ + k] = original_[i * total_ + basic_[k]];
    }
    std::vector<double> rhs(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double r = rhs_[i];
      for (std::size_t j = 0; j < total_; ++j) {
        if (state_[j] != VarState::basic) r -= original_[i * total_ + j] * value_[j];
      }
      rhs[i] = r;
    }
    tableau_ = original_;
    // Gauss-Jordan with partial pivoting on [B | A | r].
    for (std::size_t k = 0; k < m_; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < m_; ++i) {
        if (std::abs(basis[i * m_ + k]) > std::abs(basis[piv * m_ + k])) piv = i;
      }
      if (std::abs(basis[piv * m_ + k]) < 1e-14) throw NumericalError("simplex basis became singular");
      if (piv != k) {
        std::swap_ranges(basis.begin() + k * m_, basis.begin() + (k + 1) * m_, basis.begin() + piv * m_);
        std::swap_ranges(tableau_.begin() + k * total_, tableau_.begin() + (k + 1) * total_,
                         tableau_.begin() + piv * total_);
        std::swap(rhs[k], rhs[piv]);
      }
      const double inv = 1.0 / basis[k * m_ + k];
      for (std::size_t j = 0; j < m_; ++j) basis[k * m_ + j] *= inv;
      for (std::size_t j = 0; j < total_; ++j) tableau_[k * total_ + j] *= inv;
      rhs[k] *= inv;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == k) continue;
        const double f = basis[i * m_ + k];
        if (f == 0.0) continue;
        for (std::size_t j = 0; j < m_; ++j) basis[i * m_ + j] -= f * basis[k * m_ + j];
        for (std::size_t j = 0; j < total_; ++j) tableau_[i * total_ + j] -= f * tableau_[k * total_ + j];
        rhs[i] -= f * rhs[k];
      }
    }
    for (std::size_t k = 0; k < m_; ++k) value_[basic_[k]] = rhs[k];
  }

  void pivot(std::size_t r, std::size_t col) {
    double* row = &tableau_[r * total_];
    const double inv = 1.0 / row[col];
    for (std::size_t j = 0; j < total_; ++j) row[j] *= inv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* other = &tableau_[i * total_];
      const double f = other[col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < total_; ++j) other[j] -= f * row[j];
    }
  }

  std::size_t m_, n_, total_;
  std::vector<double> lower_, upper_, value_;
  std::vector<VarState> state_;
  std::vector<double> tableau_;
  std::vector<std::size_t> basic_;
  std::size_t degenerate_run_ = 0;
  std::size_t since_refactor_ = 0;
  std::vector<double> original_, rhs_;
};

}  // namespace

Solution solve_bounded_simplex(const Problem& p, std::size_t max_iterations) {
  if (p.a.size() != p.rows * p.cols || p.b.size() != p.rows || p.c.size() != p.cols ||
      p.lower.size() != p.cols || p.upper.size() != p.cols ||
      (!p.start.empty() && p.start.size() != p.cols)) {
    throw ParameterError("linear program dimensions are inconsistent");
  }
  for (std::size_t j = 0; j < p.cols; ++j) {
    if (p.lower[j] > p.upper[j]) throw ParameterError("variable bounds are crossed");
  }
  Solution sol;
  DenseSimplex simplex(p);
  std::vector<double> phase1(simplex.total(), 0.0);
  std::fill(phase1.begin() + static_cast<std::ptrdiff_t>(p.cols), phase1.end(), 1.0);
  double scale = 1.0;
  for (double v : p.b) scale = std::max(scale, std::abs(v));
  const double feasible = 1e-9 * scale;
  sol.status = simplex.run(phase1, max_iterations, sol.iterations, feasible);
  if (sol.status != Status::optimal) return sol;
  if (simplex.artificial_sum() > 1e-7 * scale) {
    sol.status = Status::infeasible;
    return sol;
  }
  simplex.retire_artificials();
  std::vector<double> phase2(simplex.total(), 0.0);
  std::copy(p.c.begin(), p.c.end(), phase2.begin());
  sol.status = simplex.run(phase2, max_iterations, sol.iterations);
  sol.x.assign(simplex.values().begin(), simplex.values().begin() + static_cast<std::ptrdiff_t>(p.cols));
  sol.objective = std::inner_product(p.c.begin(), p.c.end(), sol.x.begin(), 0.0);
  return sol;
}

// ---------------------------------------------------------------------------
// Piecewise-linear simplex

double PiecewiseLinear::operator()(double v) const {
  // Normalized to zero at the first breakpoint.
  if (breakpoints.empty()) return slopes.front() * v;
  double acc = 0.0;
  const double b0 = breakpoints.front();
  if (v <= b0) return slopes.front() * (v - b0);
  double prev = b0;
  for (std::size_t i = 1; i <= breakpoints.size(); ++i) {
    const double edge = i < breakpoints.size() ? breakpoints[i] : kInf;
    if (v <= edge) return acc + slopes[i] * (v - prev);
    acc += slopes[i] * (edge - prev);
    prev = edge;
  }
  return acc;
}

void PiecewiseProblem::add_form(const std::vector<double>& row, double offset,
                                std::uint32_t shape_index) {
  if (row.size() != vars) throw ParameterError("form length does not match variable count");
  if (shape_index >= shapes.size()) throw ParameterError("unknown piecewise shape");
  rows.insert(rows.end(), row.begin(), row.end());
  offsets.push_back(offset);
  shape.push_back(shape_index);
}

double PiecewiseProblem::evaluate(const std::vector<double>& y) const {
  double total = 0.0;
  for (std::size_t k = 0; k < forms(); ++k) {
    double v = offsets[k];
    for (std::size_t i = 0; i < vars; ++i) v += rows[k * vars + i] * y[i];
    total += shapes[shape[k]](v);
  }
  return total;
}

namespace {

constexpr int kArtificial = -1;

struct Crossing {
  double t;
  double jump;
  std::size_t form;
  std::size_t breakpoint;
};

class PiecewiseSimplex {
 public:
  explicit PiecewiseSimplex(const PiecewiseProblem& p)
      : p_(p), n_(p.vars), m_(p.forms()), off_(p.offsets), y_(n_, 0.0), v_(m_), seg_(m_, 0),
        slope_(m_, 0.0) {
    for (std::size_t k = 0; k < m_; ++k) off_[k] += perturbation(k, off_[k]);
    for (const auto& s : p.shapes) {
      if (s.slopes.size() != s.breakpoints.size() + 1) {
        throw ParameterError("piecewise shape needs one more slope than breakpoints");
      }
      for (std::size_t i = 0; i + 1 < s.slopes.size(); ++i) {
        if (s.slopes[i + 1] < s.slopes[i]) throw ParameterError("piecewise shape is not convex");
      }
    }
    basis_form_.assign(n_, kArtificial);
    basis_bp_.assign(n_, 0);
    position_.assign(m_, -1);
    inv_.assign(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) inv_[i * n_ + i] = 1.0;
    artificials_ = n_;
  }

  PiecewiseSolution solve(std::size_t max_iterations) {
    PiecewiseSolution sol;
    std::size_t degenerate_run = 0;
    std::size_t since_refactor = 0;
    std::vector<double> g(n_), w(m_), dir(n_);
    std::vector<Crossing> crossings;

    while (true) {
      refresh_values();
      // Gradient of the nonbasic forms.
      std::fill(g.begin(), g.end(), 0.0);
      for (std::size_t k = 0; k < m_; ++k) {
        if (position_[k] >= 0 || slope_[k] == 0.0) continue;
        const double* row = &p_.rows[k * n_];
        for (std::size_t i = 0; i < n_; ++i) g[i] += slope_[k] * row[i];
      }

      // Pricing: directional derivative of leaving each basis member either
      // way. Artificial members are pushed out first, even along flat
      // directions, so the basis becomes a vertex.
      const bool bland = degenerate_run >= kBlandAfter;
      std::size_t leave = n_;
      double leave_sign = 0.0, slope = 0.0;
      if (artificials_ > 0) {
        for (std::size_t j = 0; j < n_ && leave == n_; ++j) {
          if (basis_form_[j] != kArtificial) continue;
          const double z = column_dot(j, g);
          leave = j;
          leave_sign = z <= 0.0 ? 1.0 : -1.0;
          slope = -std::abs(z);
        }
      } else {
        std::size_t best_key = SIZE_MAX;
        for (std::size_t j = 0; j < n_; ++j) {
          const double z = column_dot(j, g);
          const auto k = static_cast<std::size_t>(basis_form_[j]);
          const auto& sh = p_.shapes[p_.shape[k]];
          const double up = z + sh.slopes[basis_bp_[j] + 1];
          const double down = -z - sh.slopes[basis_bp_[j]];
          for (const double sign : {1.0, -1.0}) {
            const double s = sign > 0 ? up : down;
            if (s >= -kSlopeTol) continue;
            if (bland) {
              if (k < best_key) best_key = k, leave = j, leave_sign = sign, slope = s;
            } else if (leave == n_ || s < slope) {
              leave = j, leave_sign = sign, slope = s;
            }
          }
        }
      }
      if (leave == n_) {
        sol.status = Status::optimal;
        break;
      }
      if (sol.iterations >= max_iterations) {
        sol.status = Status::iteration_limit;
        break;
      }
      ++sol.iterations;

      for (std::size_t i = 0; i < n_; ++i) dir[i] = leave_sign * inv_[i * n_ + leave];

      // Breakpoints met along the ray, with the slope increase each one causes.
      crossings.clear();
      for (std::size_t k = 0; k < m_; ++k) {
        if (position_[k] >= 0) {
          w[k] = 0.0;
          continue;
        }
        const double* row = &p_.rows[k * n_];
        double rate = 0.0;
        for (std::size_t i = 0; i < n_; ++i) rate += row[i] * dir[i];
        w[k] = rate;
        if (std::abs(rate) < kRateTol) continue;
        const auto& sh = p_.shapes[p_.shape[k]];
        if (rate > 0.0) {
          for (std::size_t b = seg_[k]; b < sh.breakpoints.size(); ++b) {
            crossings.push_back({std::max(0.0, (sh.breakpoints[b] - v_[k]) / rate),
                                 (sh.slopes[b + 1] - sh.slopes[b]) * rate, k, b});
          }
        } else {
          for (std::size_t b = seg_[k]; b-- > 0;) {
            crossings.push_back({std::max(0.0, (sh.breakpoints[b] - v_[k]) / rate),
                                 (sh.slopes[b + 1] - sh.slopes[b]) * -rate, k, b});
          }
        }
      }
      // The leaving form itself may reach its next breakpoint.
      if (basis_form_[leave] != kArtificial) {
        const auto k = static_cast<std::size_t>(basis_form_[leave]);
        const auto& sh = p_.shapes[p_.shape[k]];
        const std::size_t b = basis_bp_[leave];
        if (leave_sign > 0 && b + 1 < sh.breakpoints.size()) {
          crossings.push_back({sh.breakpoints[b + 1] - sh.breakpoints[b],
                               sh.slopes[b + 2] - sh.slopes[b + 1], k, b + 1});
        } else if (leave_sign < 0 && b > 0) {
          crossings.push_back({sh.breakpoints[b] - sh.breakpoints[b - 1],
                               sh.slopes[b] - sh.slopes[b - 1], k, b - 1});
        }
      }
      std::sort(crossings.begin(), crossings.end(), [](const Crossing& a, const Crossing& b) {
        return a.t != b.t ? a.t < b.t : a.form < b.form;
      });
      const Crossing* stop = nullptr;
      if (bland && !crossings.empty()) {
        // Plain ratio test: block at the first breakpoint, ties to the lowest form.
        const double tie = crossings.front().t + kStepTol;
        for (const auto& c : crossings) {
          if (c.t > tie) break;
          if (stop == nullptr || c.form < stop->form) stop = &c;
        }
      } else {
        for (const auto& c : crossings) {
          slope += c.jump;
          if (slope >= -kSlopeTol) {
            stop = &c;
            break;
          }
        }
      }
      if (stop == nullptr) {
        sol.status = Status::unbounded;
        break;
      }
      degenerate_run = stop->t <= kStepTol ? degenerate_run + 1 : 0;
      if (degenerate_run >= kReperturbAfter && jitter_ < kMaxJitter) {
        // Roundoff has outgrown the perturbation; widen it and start afresh.
        jitter_ *= 100.0;
        ++salt_;
        for (std::size_t k = 0; k < m_; ++k) off_[k] = p_.offsets[k] + perturbation(k, p_.offsets[k]);
        degenerate_run = 0;
        continue;
      }

      if (basis_form_[leave] != kArtificial &&
          stop->form == static_cast<std::size_t>(basis_form_[leave])) {
        basis_bp_[leave] = stop->breakpoint;  // moved to its neighbouring breakpoint
      } else {
        replace(leave, stop->form, stop->breakpoint);
        if (++since_refactor >= kRefactorEvery) {
          refactor();
          since_refactor = 0;
        }
      }
    }
    off_ = p_.offsets;
    refresh_values();
    sol.y = y_;
    sol.objective = p_.evaluate(y_);
    return sol;
  }

 private:
  static constexpr double kSlopeTol = 1e-9;
  static constexpr double kRateTol = 1e-10;
  static constexpr double kStepTol = 1e-12;
  static constexpr std::size_t kBlandAfter = 50;
  static constexpr std::size_t kRefactorEvery = 64;
  static constexpr double kSnap = 1e-12;
  static constexpr double kJitter = 1e-9;
  static constexpr double kMaxJitter = 1e-5;
  static constexpr std::size_t kReperturbAfter = 500;

  double column_dot(std::size_t j, const std::vector<double>& g) const {
    double z = 0.0;
    for (std::size_t i = 0; i < n_; ++i) z += g[i] * inv_[i * n_ + j];
    return z;
  }

  double basis_row_entry(std::size_t j, std::size_t i) const {
    if (basis_form_[j] == kArtificial) return j == i ? 1.0 : 0.0;  // artificial j pins y_j
    return p_.rows[static_cast<std::size_t>(basis_form_[j]) * n_ + i];
  }

  double target(std::size_t j) const {
    if (basis_form_[j] == kArtificial) return 0.0;
    const auto k = static_cast<std::size_t>(basis_form_[j]);
    return p_.shapes[p_.shape[k]].breakpoints[basis_bp_[j]] - off_[k];
  }

  // y solves the basis system exactly; form values and segments follow.
  void refresh_values() {
    std::fill(y_.begin(), y_.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      const double t = target(j);
      if (t == 0.0) continue;
      for (std::size_t i = 0; i < n_; ++i) y_[i] += t * inv_[i * n_ + j];
    }
    for (std::size_t k = 0; k < m_; ++k) {
      const double* row = &p_.rows[k * n_];
      double v = off_[k];
      for (std::size_t i = 0; i < n_; ++i) v += row[i] * y_[i];
      const auto& sh = p_.shapes[p_.shape[k]];
      if (position_[k] >= 0) {
        const auto j = static_cast<std::size_t>(position_[k]);
        v = sh.breakpoints[basis_bp_[j]];
        seg_[k] = basis_bp_[j];
      } else {
        std::size_t s = 0;
        while (s < sh.breakpoints.size() &&
               sh.breakpoints[s] < v - kSnap * std::max(1.0, std::abs(sh.breakpoints[s]))) {
          ++s;
        }
        seg_[k] = s;
        if (s < sh.breakpoints.size() &&
            std::abs(v - sh.breakpoints[s]) <= kSnap * std::max(1.0, std::abs(sh.breakpoints[s]))) {
          v = sh.breakpoints[s];
        }
      }
      v_[k] = v;
      slope_[k] = sh.slopes[seg_[k]];
    }
  }

  // Basis member j (row r_j) is replaced by form k at breakpoint bp.
  void replace(std::size_t j, std::size_t k, std::size_t bp) {
    const double* row = &p_.rows[k * n_];
    std::vector<double> omega(n_, 0.0);
    for (std::size_t c = 0; c < n_; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < n_; ++i) s += row[i] * inv_[i * n_ + c];
      omega[c] = s;
    }
    const double piv = omega[j];
    if (std::abs(piv) < 1e-14) throw NumericalError("singular basis update in piecewise simplex");
    for (std::size_t i = 0; i < n_; ++i) inv_[i * n_ + j] /= piv;
    for (std::size_t c = 0; c < n_; ++c) {
      if (c == j || omega[c] == 0.0) continue;
      for (std::size_t i = 0; i < n_; ++i) inv_[i * n_ + c] -= omega[c] * inv_[i * n_ + j];
    }
    if (basis_form_[j] == kArtificial) {
      --artificials_;
    } else {
      position_[static_cast<std::size_t>(basis_form_[j])] = -1;
    }
    basis_form_[j] = static_cast<int>(k);
    basis_bp_[j] = bp;
    position_[k] = static_cast<int>(j);
  }

  // Recomputes the inverse of the basis matrix by Gauss-Jordan elimination.
  void refactor() {
    std::vector<double> a(n_ * n_);
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i = 0; i < n_; ++i) a[j * n_ + i] = basis_row_entry(j, i);
    }
    std::vector<double> inv(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) inv[i * n_ + i] = 1.0;
    // Solve A X = I where row j of A is basis row j; inverse columns = X columns.
    for (std::size_t col = 0; col < n_; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < n_; ++r) {
        if (std::abs(a[r * n_ + col]) > std::abs(a[piv * n_ + col])) piv = r;
      }
      if (std::abs(a[piv * n_ + col]) < 1e-14) throw NumericalError("singular basis in piecewise simplex");
      if (piv != col) {
        for (std::size_t c = 0; c < n_; ++c) {
          std::swap(a[piv * n_ + c], a[col * n_ + c]);
          std::swap(inv[piv * n_ + c], inv[col * n_ + c]);
        }
      }
      const double d = 1.0 / a[col * n_ + col];
      for (std::size_t c = 0; c < n_; ++c) {
        a[col * n_ + c] *= d;
        inv[col * n_ + c] *= d;
      }
      for (std::size_t r = 0; r < n_; ++r) {
        if (r == col) continue;
        const double f = a[r * n_ + col];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < n_; ++c) {
          a[r * n_ + c] -= f * a[col * n_ + c];
          inv[r * n_ + c] -= f * inv[col * n_ + c];
        }
      }
    }
    // inv now holds A^{-1} (row-major), whose column j is direction d_j.
    inv_ = std::move(inv);
  }

  // Deterministic offset jitter in [-jitter_, jitter_] (1 + |offset|).
  double perturbation(std::size_t k, double offset) const {
    std::uint64_t x = k + (salt_ + 1) * 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    x ^= x >> 31;
    const double u = static_cast<double>(x >> 11) * 0x1.0p-53;
    return jitter_ * (2.0 * u - 1.0) * (1.0 + std::abs(offset));
  }

  const PiecewiseProblem& p_;
  std::size_t n_, m_;
  std::vector<double> off_;
  std::vector<double> y_, v_;
  std::vector<std::size_t> seg_;
  std::vector<double> slope_;
  std::vector<int> basis_form_;
  std::vector<std::size_t> basis_bp_;
  std::vector<int> position_;
  std::vector<double> inv_;  // row-major; column j is the direction of basis member j
  std::size_t artificials_ = 0;
  double jitter_ = kJitter;
  std::uint64_t salt_ = 0;
};

}  // namespace

PiecewiseSolution minimize_piecewise(const PiecewiseProblem& problem, std::size_t max_iterations) {
  if (problem.rows.size() != problem.forms() * problem.vars || problem.shape.size() != problem.forms()) {
    throw ParameterError("piecewise problem dimensions are inconsistent");
  }
  if (problem.vars == 0) {
    PiecewiseSolution sol;
    sol.status = Status::optimal;
    sol.objective = problem.evaluate({});
    return sol;
  }
  PiecewiseSimplex simplex(problem);
  return simplex.solve(max_iterations);
}

}  // namespace fragile::lp
