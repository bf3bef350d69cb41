#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <queue>
#include <vector>

#include "ucs/errors.hpp"
#include "ucs/lp.hpp"

namespace ucs {

struct MixedIntegerProgram {
  LinearProgram base;
  std::vector<int> binary_vars;  // indices into base variables, bounds within [0,1]
};

enum class MIPStatus { OPTIMAL, INFEASIBLE, GAP_LIMIT };

struct MIPSolution {
  MIPStatus status = MIPStatus::INFEASIBLE;
  double objective_value = 0.0;
  double bound = 0.0;  // best dual bound
  double gap = 0.0;    // relative
  std::vector<double> primal;
  long nodes = 0;
};

struct MIPOptions {
  double integrality_tol = 1e-6;
  double gap_tol = 1e-6;  // relative
  long node_limit = 1000000;
  LPOptions lp;
  std::ostream* log = nullptr;
  long log_interval = 0;  // nodes between progress lines, 0 = silent
};

namespace detail {

inline double rel_gap(double incumbent, double bound) {
  return std::fabs(incumbent - bound) / std::max(1.0, std::fabs(incumbent));
}

// Best-first branch and bound on binary variables. Branching picks the most
// fractional binary, ties by lowest variable index; nodes with equal bounds
// pop in creation order so the search is deterministic.
class BranchAndBound {
 public:
  BranchAndBound(const MixedIntegerProgram& mip, const MIPOptions& opt)
      : mip_(mip), opt_(opt) {
    better_ = mip.base.objective_sense == Sense::MIN
                  ? std::function<bool(double, double)>(
                        [](double a, double b) { return a < b; })
                  : [](double a, double b) { return a > b; };
  }

  MIPSolution solve() {
    MIPSolution out;
    struct Node {
      double bound;
      long id;
      std::vector<std::pair<int, int>> fixes;  // (binary var, 0/1)
    };
    auto node_order = [this](const Node& a, const Node& b) {
      if (a.bound != b.bound) return !better_(a.bound, b.bound);
      return a.id > b.id;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(node_order)> open(node_order);

    long next_id = 0;
    bool have_incumbent = false;
    double incumbent = 0.0;
    std::vector<double> incumbent_primal;
    double best_open_bound = 0.0;
    bool root_solved = false;

    auto lp_relax = [this](const std::vector<std::pair<int, int>>& fixes) {
      LinearProgram p = mip_.base;
      for (const auto& [v, val] : fixes)
        p.var_lower[v] = p.var_upper[v] = static_cast<double>(val);
      return solve_lp(p, opt_.lp);
    };

    open.push({0.0, next_id++, {}});
    long nodes = 0;
    while (!open.empty()) {
      Node node = open.top();
      open.pop();
      if (root_solved && have_incumbent && !better_(node.bound, incumbent))
        continue;  // pruned by bound
      if (++nodes > opt_.node_limit) break;

      LPSolution rel = lp_relax(node.fixes);
      if (rel.status == LPStatus::UNBOUNDED)
        throw NumericalBreakdownError("unbounded LP relaxation in branch and bound");
      if (rel.status == LPStatus::INFEASIBLE) {
        if (!root_solved) { root_solved = true; }
        continue;
      }
      if (!root_solved) {
        root_solved = true;
        out.bound = rel.objective_value;
      }
      // Child bounds can never beat the parent; clamp against drift.
      if (node.fixes.empty()) node.bound = rel.objective_value;
      const double bound =
          better_(rel.objective_value, node.bound) && !node.fixes.empty()
              ? node.bound
              : rel.objective_value;
      if (have_incumbent && !better_(bound, incumbent)) continue;

      int branch_var = -1;
      double most_frac = opt_.integrality_tol;
      for (int v : mip_.binary_vars) {
        const double f = std::fabs(rel.primal[v] - std::round(rel.primal[v]));
        if (f > most_frac + 1e-12) {
          most_frac = f;
          branch_var = v;
        }
      }
      if (branch_var < 0) {
        // Integral relaxation: candidate incumbent.
        if (!have_incumbent || better_(rel.objective_value, incumbent)) {
          have_incumbent = true;
          incumbent = rel.objective_value;
          incumbent_primal = rel.primal;
          for (int v : mip_.binary_vars)
            incumbent_primal[v] = std::round(incumbent_primal[v]);
        }
      } else {
        if (nodes == 1) {
          // Rounding probes at the root: nearest value, and everything
          // fractional rounded up (exact for units with a zero floor).
          for (double threshold : {0.5, opt_.integrality_tol}) {
            std::vector<std::pair<int, int>> probe = node.fixes;
            for (int v : mip_.binary_vars)
              probe.emplace_back(v, rel.primal[v] > threshold ? 1 : 0);
            LPSolution probed = lp_relax(probe);
            if (probed.status == LPStatus::OPTIMAL &&
                (!have_incumbent || better_(probed.objective_value, incumbent))) {
              have_incumbent = true;
              incumbent = probed.objective_value;
              incumbent_primal = probed.primal;
              for (int v : mip_.binary_vars)
                incumbent_primal[v] = std::round(incumbent_primal[v]);
            }
          }
        }
        for (int val : {0, 1}) {
          Node child;
          child.bound = bound;
          child.id = next_id++;
          child.fixes = node.fixes;
          child.fixes.emplace_back(branch_var, val);
          open.push(child);
        }
      }

      best_open_bound = open.empty() ? (have_incumbent ? incumbent : bound)
                                     : open.top().bound;
      if (opt_.log && opt_.log_interval > 0 && nodes % opt_.log_interval == 0) {
        (*opt_.log) << "node=" << nodes << " bound=" << best_open_bound
                    << " incumbent="
                    << (have_incumbent ? std::to_string(incumbent) : "none")
                    << " gap="
                    << (have_incumbent ? rel_gap(incumbent, best_open_bound) : 1.0)
                    << '\n';
      }
      if (have_incumbent && (open.empty() ||
                             rel_gap(incumbent, best_open_bound) <= opt_.gap_tol))
        break;
    }

    out.nodes = nodes;
    const bool hit_limit = nodes > opt_.node_limit;
    if (!have_incumbent) {
      if (hit_limit) {
        out.status = MIPStatus::GAP_LIMIT;
        out.gap = 1.0;
        out.bound = open.empty() ? out.bound : open.top().bound;
      } else {
        out.status = MIPStatus::INFEASIBLE;
      }
      return out;
    }
    out.objective_value = incumbent;
    out.primal = std::move(incumbent_primal);
    double final_bound = incumbent;
    if (!open.empty()) {
      const double ob = open.top().bound;
      if (better_(ob, incumbent)) final_bound = ob;
    }
    out.bound = final_bound;
    out.gap = rel_gap(incumbent, final_bound);
    out.status = (hit_limit && out.gap > opt_.gap_tol) ? MIPStatus::GAP_LIMIT
                                                       : MIPStatus::OPTIMAL;
    return out;
  }

 private:
  const MixedIntegerProgram& mip_;
  MIPOptions opt_;
  std::function<bool(double, double)> better_;
};

}  // namespace detail

inline MIPSolution solve_mip(const MixedIntegerProgram& mip,
                             const MIPOptions& opt = {}) {
  for (int v : mip.binary_vars)
    if (mip.base.var_lower[v] < -1e-9 || mip.base.var_upper[v] > 1.0 + 1e-9)
      throw ValidationError("binary variable bounds must lie within [0,1]");
  detail::BranchAndBound bb(mip, opt);
  return bb.solve();
}

}  // namespace ucs
