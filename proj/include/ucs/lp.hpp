#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ucs/errors.hpp"

namespace ucs {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { MIN, MAX };

// Standard-form bounded LP: optimize c'x subject to
// row_lower <= A x <= row_upper and var_lower <= x <= var_upper.
struct LinearProgram {
  Sense objective_sense = Sense::MIN;
  std::vector<double> objective;
  std::vector<std::vector<std::pair<int, double>>> rows;  // sparse, by row
  std::vector<double> row_lower, row_upper;
  std::vector<double> var_lower, var_upper;

  int num_vars() const { return static_cast<int>(objective.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_var(double lb, double ub, double cost = 0.0) {
    objective.push_back(cost);
    var_lower.push_back(lb);
    var_upper.push_back(ub);
    return num_vars() - 1;
  }

  int add_row(double lb, double ub, std::vector<std::pair<int, double>> entries) {
    rows.push_back(std::move(entries));
    row_lower.push_back(lb);
    row_upper.push_back(ub);
    return num_rows() - 1;
  }
};

enum class LPStatus { OPTIMAL, INFEASIBLE, UNBOUNDED };

struct LPSolution {
  LPStatus status = LPStatus::INFEASIBLE;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  std::vector<double> primal;       // structural variables
  std::vector<double> duals;        // one multiplier per row
  std::vector<double> farkas_ray;   // row multipliers certifying infeasibility
  std::vector<double> unbounded_ray;  // structural direction of unbounded improvement
  int iterations = 0;
};

struct LPOptions {
  double feas_tol = 1e-7;
  double pivot_tol = 1e-9;
  int iteration_limit = 0;  // 0 = automatic
};

namespace detail {

// Dense-tableau bounded-variable primal simplex. Dantzig pricing with
// lowest-index tie-break; switches to Bland's rule after 2*n_vars
// degenerate pivots. Constraints are held as -A x + s = 0 with slack bounds
// equal to the row bounds, so the initial slack basis is always available.
class SimplexSolver {
 public:
  SimplexSolver(const LinearProgram& lp, const LPOptions& opt)
      : lp_(lp), opt_(opt), n_(lp.num_vars()), m_(lp.num_rows()), nt_(n_ + m_) {}

  LPSolution solve() {
    for (int j = 0; j < n_; ++j)
      if (lp_.var_lower[j] > lp_.var_upper[j] + opt_.feas_tol)
        return trivial_infeasible();
    for (int i = 0; i < m_; ++i)
      if (lp_.row_lower[i] > lp_.row_upper[i] + opt_.feas_tol)
        return trivial_infeasible();

    build();
    const int limit = opt_.iteration_limit > 0
                          ? opt_.iteration_limit
                          : 20000 + 200 * (n_ + m_);

    LPSolution sol;
    sol.primal.assign(n_, 0.0);
    sol.duals.assign(m_, 0.0);

    // Phase 1: drive basic variables inside their bounds.
    while (true) {
      if (++iter_ > limit) throw IterationLimitError("simplex iteration limit");
      if (!phase1_step(sol)) break;
    }
    if (infeasibility() > phase1_tol()) {
      sol.status = LPStatus::INFEASIBLE;
      sol.farkas_ray = farkas();
      sol.iterations = iter_;
      return sol;
    }

    // Phase 2: optimize.
    while (true) {
      if (++iter_ > limit) throw IterationLimitError("simplex iteration limit");
      if (!phase2_step(sol)) break;
    }
    if (sol.status == LPStatus::UNBOUNDED) {
      sol.iterations = iter_;
      return sol;
    }

    sol.status = LPStatus::OPTIMAL;
    for (int j = 0; j < n_; ++j) sol.primal[j] = x_[j];
    finish_duals(sol);
    sol.iterations = iter_;
    return sol;
  }

 private:
  static constexpr int kBasic = -1;
  enum NonbasicState : int8_t { AT_LOWER = 0, AT_UPPER = 1, AT_FREE = 2 };

  LPSolution trivial_infeasible() {
    LPSolution sol;
    sol.status = LPStatus::INFEASIBLE;
    sol.primal.assign(n_, 0.0);
    sol.duals.assign(m_, 0.0);
    return sol;
  }

  double lb(int j) const { return j < n_ ? lp_.var_lower[j] : lp_.row_lower[j - n_]; }
  double ub(int j) const { return j < n_ ? lp_.var_upper[j] : lp_.row_upper[j - n_]; }
  double cost(int j) const { return j < n_ ? csign_ * lp_.objective[j] : 0.0; }

  void build() {
    csign_ = lp_.objective_sense == Sense::MAX ? 1.0 : -1.0;
    tab_.assign(static_cast<std::size_t>(m_) * nt_, 0.0);
    // Rows are stored negated (-A x + s = 0) so every initial basic column
    // carries coefficient +1; pivoting preserves that normalization.
    for (int i = 0; i < m_; ++i) {
      double* row = &tab_[static_cast<std::size_t>(i) * nt_];
      for (const auto& [j, v] : lp_.rows[i]) row[j] -= v;
      row[n_ + i] = 1.0;
    }
    basis_.resize(m_);
    in_row_.assign(nt_, kBasic);
    state_.assign(nt_, AT_LOWER);
    x_.assign(nt_, 0.0);
    for (int j = 0; j < nt_; ++j) {
      if (std::isfinite(lb(j))) {
        state_[j] = AT_LOWER;
        x_[j] = lb(j);
      } else if (std::isfinite(ub(j))) {
        state_[j] = AT_UPPER;
        x_[j] = ub(j);
      } else {
        state_[j] = AT_FREE;
        x_[j] = 0.0;
      }
    }
    for (int i = 0; i < m_; ++i) {
      const int s = n_ + i;
      basis_[i] = s;
      in_row_[s] = i;
      double act = 0.0;
      for (const auto& [j, v] : lp_.rows[i]) act += v * x_[j];
      x_[s] = act;
    }
    iter_ = 0;
    degen_count_ = 0;
  }

  double phase1_tol() const { return 10.0 * opt_.feas_tol; }

  double infeasibility() const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[i];
      if (x_[b] < lb(b)) s += lb(b) - x_[b];
      if (x_[b] > ub(b)) s += x_[b] - ub(b);
    }
    return s;
  }

  // sigma_i: +1 when basic of row i is below its lower bound, -1 when above
  // its upper bound, 0 when feasible.
  std::vector<int> sigma() const {
    std::vector<int> s(m_, 0);
    for (int i = 0; i < m_; ++i) {
      const int b = basis_[i];
      if (x_[b] < lb(b) - opt_.feas_tol)
        s[i] = 1;
      else if (x_[b] > ub(b) + opt_.feas_tol)
        s[i] = -1;
    }
    return s;
  }

  std::vector<double> farkas() const {
    // Combination of B^{-1} rows weighted by the violation signs; the slack
    // block of the tableau holds B^{-1}.
    std::vector<int> sg = sigma();
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (sg[i] == 0) continue;
      const double* row = &tab_[static_cast<std::size_t>(i) * nt_];
      for (int k = 0; k < m_; ++k) y[k] += sg[i] * row[n_ + k];
    }
    return y;
  }

  // Returns true while progress is possible.
  bool phase1_step(LPSolution&) {
    std::vector<int> sg = sigma();
    bool any = false;
    for (int v : sg) any = any || v != 0;
    if (!any) return false;

    const bool bland = degen_count_ > 2 * std::max(1, n_);
    int enter = -1, dir = 0;
    double best = opt_.feas_tol;
    for (int j = 0; j < nt_; ++j) {
      if (in_row_[j] != kBasic) continue;
      if (lb(j) == ub(j)) continue;  // fixed variable, never enters
      double g = 0.0;
      for (int i = 0; i < m_; ++i)
        if (sg[i] != 0) g += sg[i] * tab_[static_cast<std::size_t>(i) * nt_ + j];
      int d = 0;
      if ((state_[j] == AT_LOWER || state_[j] == AT_FREE) && g < -best) d = 1;
      if ((state_[j] == AT_UPPER || state_[j] == AT_FREE) && g > best) d = -1;
      if (d != 0) {
        enter = j;
        dir = d;
        if (bland) break;
        best = std::fabs(g);
      }
    }
    if (enter < 0) return false;  // phase-1 optimal (may still be infeasible)
    do_ratio_and_pivot(enter, dir, &sg);
    return true;
  }

  bool phase2_step(LPSolution& sol) {
    // Reduced costs d_j = c_j - c_B' B^{-1} a_j, internal sense = maximize.
    std::vector<double> cb(m_);
    bool any_cb = false;
    for (int i = 0; i < m_; ++i) {
      cb[i] = cost(basis_[i]);
      any_cb = any_cb || cb[i] != 0.0;
    }
    const bool bland = degen_count_ > 2 * std::max(1, n_);
    int enter = -1, dir = 0;
    double best = opt_.feas_tol;
    for (int j = 0; j < nt_; ++j) {
      if (in_row_[j] != kBasic) continue;
      if (lb(j) == ub(j)) continue;
      double d = cost(j);
      if (any_cb || d != 0.0) {
        if (any_cb) {
          for (int i = 0; i < m_; ++i)
            if (cb[i] != 0.0) d -= cb[i] * tab_[static_cast<std::size_t>(i) * nt_ + j];
        }
      }
      int dd = 0;
      if ((state_[j] == AT_LOWER || state_[j] == AT_FREE) && d > best) dd = 1;
      if ((state_[j] == AT_UPPER || state_[j] == AT_FREE) && d < -best) dd = -1;
      if (dd != 0) {
        enter = j;
        dir = dd;
        if (bland) break;
        best = std::fabs(d);
      }
    }
    if (enter < 0) return false;  // optimal
    if (!do_ratio_and_pivot(enter, dir, nullptr)) {
      sol.status = LPStatus::UNBOUNDED;
      sol.unbounded_ray.assign(n_, 0.0);
      if (enter < n_) sol.unbounded_ray[enter] = dir;
      for (int i = 0; i < m_; ++i) {
        const int b = basis_[i];
        if (b < n_)
          sol.unbounded_ray[b] = -dir * tab_[static_cast<std::size_t>(i) * nt_ + enter];
      }
      for (int j = 0; j < n_; ++j) sol.primal[j] = x_[j];
      return false;
    }
    return true;
  }

  // Ratio test plus pivot (or bound flip). Returns false when no blocking
  // bound exists (unbounded direction). In phase 1 (sg != nullptr) infeasible
  // basics block at the bound they are violating.
  bool do_ratio_and_pivot(int enter, int dir, const std::vector<int>* sg) {
    double step = kInf;
    int leave_row = -1;
    int leave_to_upper = 0;
    double leave_pivot = 0.0;
    // Entering variable's own range.
    if (std::isfinite(lb(enter)) && std::isfinite(ub(enter)))
      step = ub(enter) - lb(enter);

    for (int i = 0; i < m_; ++i) {
      const double t = tab_[static_cast<std::size_t>(i) * nt_ + enter];
      if (std::fabs(t) <= opt_.pivot_tol) continue;
      const int b = basis_[i];
      const double delta = -dir * t;  // rate of change of basic value
      const int s = sg ? (*sg)[i] : 0;
      double bound = kInf;
      int to_upper = 0;
      if (s == 0) {
        if (delta > 0 && std::isfinite(ub(b))) {
          bound = (ub(b) - x_[b]) / delta;
          to_upper = 1;
        } else if (delta < 0 && std::isfinite(lb(b))) {
          bound = (lb(b) - x_[b]) / delta;
          to_upper = 0;
        }
      } else if (s == 1) {  // below lower bound, blocks on reaching it
        if (delta > 0) {
          bound = (lb(b) - x_[b]) / delta;
          to_upper = 0;
        }
      } else {  // above upper bound
        if (delta < 0) {
          bound = (ub(b) - x_[b]) / delta;
          to_upper = 1;
        }
      }
      if (bound < -1e-12) bound = 0.0;
      if (bound < step - 1e-12 ||
          (bound < step + 1e-12 && leave_row >= 0 &&
           std::fabs(t) > std::fabs(leave_pivot) + 1e-12)) {
        step = std::max(bound, 0.0);
        leave_row = i;
        leave_to_upper = to_upper;
        leave_pivot = t;
      }
    }

    if (!std::isfinite(step)) {
      if (sg) throw NumericalBreakdownError("phase-1 direction unblocked");
      return false;  // unbounded
    }
    if (step <= 1e-12) ++degen_count_; else degen_count_ = 0;

    // Move the entering variable and update all basic values.
    const double move = dir * step;
    if (move != 0.0) {
      for (int i = 0; i < m_; ++i) {
        const double t = tab_[static_cast<std::size_t>(i) * nt_ + enter];
        if (t != 0.0) x_[basis_[i]] -= move * t;
      }
      x_[enter] += move;
    }

    if (leave_row < 0) {
      // Bound flip: entering travelled to its opposite bound.
      state_[enter] = dir > 0 ? AT_UPPER : AT_LOWER;
      x_[enter] = dir > 0 ? ub(enter) : lb(enter);
      return true;
    }

    const int leave = basis_[leave_row];
    // Snap the leaving variable onto its bound.
    x_[leave] = leave_to_upper ? ub(leave) : lb(leave);
    state_[leave] = leave_to_upper ? AT_UPPER : AT_LOWER;
    in_row_[leave] = kBasic;
    basis_[leave_row] = enter;
    in_row_[enter] = leave_row;

    // Gauss-Jordan update of the tableau.
    double* prow = &tab_[static_cast<std::size_t>(leave_row) * nt_];
    const double piv = prow[enter];
    if (std::fabs(piv) < opt_.pivot_tol)
      throw NumericalBreakdownError("pivot below pivot_tol");
    const double inv = 1.0 / piv;
    for (int j = 0; j < nt_; ++j) prow[j] *= inv;
    prow[enter] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == leave_row) continue;
      double* row = &tab_[static_cast<std::size_t>(i) * nt_];
      const double f = row[enter];
      if (f == 0.0) continue;
      for (int j = 0; j < nt_; ++j) row[j] -= f * prow[j];
      row[enter] = 0.0;
    }
    return true;
  }

  void finish_duals(LPSolution& sol) {
    double obj = 0.0;
    for (int j = 0; j < n_; ++j) obj += lp_.objective[j] * x_[j];
    sol.objective_value = obj;

    std::vector<double> cb(m_);
    for (int i = 0; i < m_; ++i) cb[i] = cost(basis_[i]);
    // Row multipliers: the reduced cost of slack i equals the dual of row i
    // (positive when the row binds at its upper bound under maximization).
    std::vector<double> y(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (cb[i] == 0.0) continue;
      const double* row = &tab_[static_cast<std::size_t>(i) * nt_];
      for (int k = 0; k < m_; ++k) y[k] -= cb[i] * row[n_ + k];
    }
    // Dual objective: sum over variables of the reduced cost times the bound
    // the sign points at (constraint rhs is zero in slack form).
    double dual_obj = 0.0;
    for (int j = 0; j < nt_; ++j) {
      if (in_row_[j] != kBasic) continue;
      double d = cost(j);
      for (int i = 0; i < m_; ++i)
        if (cb[i] != 0.0) d -= cb[i] * tab_[static_cast<std::size_t>(i) * nt_ + j];
      if (std::fabs(d) <= opt_.feas_tol) continue;
      dual_obj += d > 0 ? d * ub(j) : d * lb(j);
    }
    sol.dual_objective = csign_ * dual_obj;
    for (int k = 0; k < m_; ++k) sol.duals[k] = csign_ * y[k];
  }

  const LinearProgram& lp_;
  LPOptions opt_;
  int n_, m_, nt_;
  double csign_ = 1.0;
  std::vector<double> tab_;
  std::vector<int> basis_;
  std::vector<int> in_row_;
  std::vector<int8_t> state_;
  std::vector<double> x_;
  int iter_ = 0;
  int degen_count_ = 0;
};

}  // namespace detail

inline LPSolution solve_lp(const LinearProgram& lp, const LPOptions& opt = {}) {
  detail::SimplexSolver solver(lp, opt);
  return solver.solve();
}

// Solves with the given variables pinned to fixed values. A fix outside the
// variable's bounds yields INFEASIBLE.
inline LPSolution solve_lp_restricted(const LinearProgram& lp,
                                      const std::map<int, double>& fixed,
                                      const LPOptions& opt = {}) {
  LinearProgram p = lp;
  for (const auto& [j, v] : fixed) {
    if (v < p.var_lower[j] - opt.feas_tol || v > p.var_upper[j] + opt.feas_tol) {
      LPSolution sol;
      sol.status = LPStatus::INFEASIBLE;
      sol.primal.assign(p.num_vars(), 0.0);
      sol.duals.assign(p.num_rows(), 0.0);
      return sol;
    }
    p.var_lower[j] = p.var_upper[j] = v;
  }
  return solve_lp(p, opt);
}

// Debug dump in an LP-style text layout; row/column names are stable
// (r<i> / x<j> by index).
inline std::string dump_lp(const LinearProgram& lp) {
  std::ostringstream out;
  out.precision(12);
  out << (lp.objective_sense == Sense::MAX ? "Maximize\n" : "Minimize\n") << " obj:";
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.objective[j] != 0.0)
      out << ' ' << (lp.objective[j] >= 0 ? "+" : "") << lp.objective[j] << " x" << j;
  out << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    out << " r" << i << ": ";
    if (std::isfinite(lp.row_lower[i])) out << lp.row_lower[i] << " <= ";
    for (const auto& [j, v] : lp.rows[i])
      out << (v >= 0 ? "+" : "") << v << " x" << j << ' ';
    if (std::isfinite(lp.row_upper[i])) out << "<= " << lp.row_upper[i];
    out << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j)
    out << ' ' << lp.var_lower[j] << " <= x" << j << " <= " << lp.var_upper[j] << '\n';
  out << "End\n";
  return out.str();
}

}  // namespace ucs
