#pragma once

#include <cmath>
#include <compare>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ucs/errors.hpp"
#include "ucs/lp.hpp"
#include "ucs/mip.hpp"
#include "ucs/model.hpp"
#include "ucs/schedule.hpp"

namespace ucs {

enum class BoundSense { UPPER, LOWER };

inline const char* to_string(BoundSense s) {
  return s == BoundSense::UPPER ? "upper" : "lower";
}

// One screened inequality: line flow bound of `line` in direction `sense`
// at 1-based `timestep`.
struct ScreeningTarget {
  int line = 0;
  BoundSense sense = BoundSense::UPPER;
  int timestep = 1;

  auto operator<=>(const ScreeningTarget&) const = default;
};

// Column bookkeeping for the UC and screening problems. Within each block
// the ordering is timestep-major, entity-minor.
struct VariableLayout {
  int ng = 0, nf = 0, nb = 0, k = 0;
  int u_offset = -1;     // ng*k columns, -1 when the model carries no u vars
  int x_offset = 0;      // ng*k columns
  int f_offset = 0;      // nf*k columns (f_all_steps) or nf (step k only)
  bool f_all_steps = true;
  int load_offset = -1;  // nb*k columns for the load-region model

  bool has_u() const { return u_offset >= 0; }
  int u_col(int gen, int t) const { return u_offset + (t - 1) * ng + gen; }
  int x_col(int gen, int t) const { return x_offset + (t - 1) * ng + gen; }
  int f_col(int coord, int t) const {
    return f_all_steps ? f_offset + (t - 1) * nf + coord : f_offset + coord;
  }
  int load_col(int bus, int t) const { return load_offset + (t - 1) * nb + bus; }
};

// The UC MILP plus enough bookkeeping to reconstruct or reduce it.
struct UCProblem {
  MixedIntegerProgram mip;
  VariableLayout layout;
  int nl = 0;
  std::vector<int> flow_row;  // (t-1)*nl + j  ->  row index
  int flow_row_index(int line, int t) const {
    return flow_row[(t - 1) * nl + line];
  }
};

namespace detail {

inline void check_loads(const UCInstance& inst, const LoadProfile& loads, int k) {
  if (loads.nb() != inst.nb())
    throw DimensionError("load profile bus count mismatch");
  if (loads.horizon() < k)
    throw DimensionError("load profile covers " + std::to_string(loads.horizon()) +
                         " steps, need " + std::to_string(k));
}

// Ramp rows shared by the UC problem and every screening model.
// ramp-up:   x(t) - x(t-1) - (Rup-Rsu) u(t-1) - (Rsu-pmax) u(t) <= pmax  (+ t=1 boundary)
// ramp-down: x(t-1) - x(t) - (Rdn-Rsd) u(t)  - (Rsd-pmax) u(t-1) <= pmax
// When `fixed` is non-null the u terms for covered steps become constants.
struct RampEmitter {
  const UCInstance& inst;
  const VariableLayout& layout;
  LinearProgram& lp;
  // u value source: returns column (>=0) or -1 with *value set to a constant.
  std::function<int(int gen, int t, double* value)> u_of;

  void emit(int k) {
    for (int t = 1; t <= k; ++t) {
      for (int i = 0; i < layout.ng; ++i) {
        const auto& g = inst.generators[i];
        emit_ramp_up(i, g, t);
        emit_ramp_down(i, g, t);
      }
    }
  }

 private:
  void add_u_term(std::vector<std::pair<int, double>>& row, double& rhs,
                  int gen, int t, double coeff) {
    if (coeff == 0.0) return;
    if (t == 0) {
      rhs += coeff * (inst.generators[gen].initial_on ? 1.0 : 0.0);
      return;
    }
    double val = 0.0;
    const int col = u_of(gen, t, &val);
    if (col >= 0)
      row.emplace_back(col, -coeff);
    else
      rhs += coeff * val;
  }

  void emit_ramp_up(int i, const Generator& g, int t) {
    std::vector<std::pair<int, double>> row;
    double rhs = g.p_max;
    row.emplace_back(layout.x_col(i, t), 1.0);
    if (t >= 2)
      row.emplace_back(layout.x_col(i, t - 1), -1.0);
    else
      rhs += g.initial_output;
    add_u_term(row, rhs, i, t - 1, g.ramp_up - g.ramp_startup);
    add_u_term(row, rhs, i, t, g.ramp_startup - g.p_max);
    lp.add_row(-kInf, rhs, std::move(row));
  }

  void emit_ramp_down(int i, const Generator& g, int t) {
    std::vector<std::pair<int, double>> row;
    double rhs = g.p_max;
    row.emplace_back(layout.x_col(i, t), -1.0);
    if (t >= 2)
      row.emplace_back(layout.x_col(i, t - 1), 1.0);
    else
      rhs -= g.initial_output;
    add_u_term(row, rhs, i, t, g.ramp_down - g.ramp_shutdown);
    add_u_term(row, rhs, i, t - 1, g.ramp_shutdown - g.p_max);
    lp.add_row(-kInf, rhs, std::move(row));
  }
};

}  // namespace detail

// Builds the multi-interval UC MILP over steps 1..horizon_k. Entries of
// fixed_u (when given) become equality-fixed binaries.
inline UCProblem build_uc(const UCInstance& inst, const LoadProfile& loads,
                          int horizon_k,
                          const PartialSchedule* fixed_u = nullptr,
                          const FlowModel* fm_in = nullptr) {
  detail::check_loads(inst, loads, horizon_k);
  FlowModel local_fm;
  const FlowModel* fm = fm_in;
  if (!fm) {
    local_fm = build_flow_model(inst);
    fm = &local_fm;
  }

  const int ng = inst.ng(), nb = inst.nb(), nl = inst.nl(), nf = nb - 1;
  const int k = horizon_k;
  UCProblem prob;
  VariableLayout& L = prob.layout;
  L.ng = ng; L.nf = nf; L.nb = nb; L.k = k;
  L.u_offset = 0;
  L.x_offset = ng * k;
  L.f_offset = 2 * ng * k;
  L.f_all_steps = true;

  LinearProgram& lp = prob.mip.base;
  lp.objective_sense = Sense::MIN;
  for (int t = 1; t <= k; ++t)
    for (int i = 0; i < ng; ++i) lp.add_var(0.0, 1.0, 0.0);  // u
  for (int t = 1; t <= k; ++t)
    for (int i = 0; i < ng; ++i)
      lp.add_var(0.0, inst.generators[i].p_max, inst.generators[i].cost);  // x
  for (int t = 1; t <= k; ++t)
    for (int c = 0; c < nf; ++c) lp.add_var(-kInf, kInf, 0.0);  // f

  for (int t = 1; t <= k; ++t)
    for (int i = 0; i < ng; ++i) prob.mip.binary_vars.push_back(L.u_col(i, t));

  prob.nl = nl;
  prob.flow_row.assign(static_cast<std::size_t>(nl) * k, -1);

  for (int t = 1; t <= k; ++t) {
    // Generation bounds coupled to commitment (1b).
    for (int i = 0; i < ng; ++i) {
      const auto& g = inst.generators[i];
      lp.add_row(0.0, kInf, {{L.x_col(i, t), 1.0}, {L.u_col(i, t), -g.p_min}});
      lp.add_row(-kInf, 0.0, {{L.x_col(i, t), 1.0}, {L.u_col(i, t), -g.p_max}});
    }
    // Flow bounds (1c).
    for (int j = 0; j < nl; ++j) {
      std::vector<std::pair<int, double>> row;
      for (int c = 0; c < nf; ++c) {
        const double kv = fm->K(j, c);
        if (kv != 0.0) row.emplace_back(L.f_col(c, t), kv);
      }
      prob.flow_row[(t - 1) * nl + j] =
          lp.add_row(-inst.lines[j].flow_limit, inst.lines[j].flow_limit,
                     std::move(row));
    }
    // Nodal balance (1d): generation minus the network injection A f meets
    // the load, G x(t) - A f(t) = l(t).
    for (int b = 0; b < nb; ++b) {
      std::vector<std::pair<int, double>> row;
      for (int i = 0; i < ng; ++i)
        if (inst.generators[i].bus == b) row.emplace_back(L.x_col(i, t), 1.0);
      for (int c = 0; c < nf; ++c) {
        const double av = fm->A(b, c);
        if (av != 0.0) row.emplace_back(L.f_col(c, t), -av);
      }
      const double l = loads.at(b, t);
      lp.add_row(l, l, std::move(row));
    }
  }
  // Ramping (1f)-(1g), t = 1 boundary from u0/x0.
  detail::RampEmitter ramps{inst, L, lp,
                            [&L](int gen, int t, double*) { return L.u_col(gen, t); }};
  ramps.emit(k);

  if (fixed_u) {
    for (int t : fixed_u->steps) {
      if (t < 1 || t > k) continue;
      for (int i = 0; i < ng; ++i) {
        const double v = fixed_u->schedule.u(i, t - 1);
        if (v != 0.0 && v != 1.0)
          throw InvalidFixError("fixed commitment outside {0,1} for generator " +
                                std::to_string(i) + " at t=" + std::to_string(t));
        const int col = L.u_col(i, t);
        lp.var_lower[col] = lp.var_upper[col] = v;
      }
    }
  }
  return prob;
}

namespace detail {

enum class ScreenKind { SINGLE, AWARE, TRUTH, PARTIAL, REGION };

struct ScreenSpec {
  ScreenKind kind = ScreenKind::AWARE;
  const CommitmentSchedule* truth = nullptr;   // TRUTH
  const PartialSchedule* partial = nullptr;    // PARTIAL
  double region_r = 0.0;                       // REGION
};

// Shared constructor for the screening LPs. All of them maximize (UPPER) or
// minimize (LOWER) K_j f(k) subject to a relaxation of the UC constraints
// over t <= k; they differ in how commitment variables are treated and, for
// the load-region model, in letting loads range over a box.
inline LinearProgram build_screen(const UCInstance& inst, const LoadProfile& loads,
                                  const ScreeningTarget& target,
                                  const FlowModel& fm, const ScreenSpec& spec,
                                  VariableLayout* layout_out = nullptr) {
  const int k = target.timestep;
  if (target.line < 0 || target.line >= inst.nl())
    throw DimensionError("screening target line out of range");
  if (k < 1 || k > inst.horizon)
    throw DimensionError("screening target timestep out of range");
  check_loads(inst, loads, k);

  const int ng = inst.ng(), nb = inst.nb(), nf = nb - 1, nl = inst.nl();
  const bool single = spec.kind == ScreenKind::SINGLE;
  const int steps = single ? 1 : k;   // how many timesteps carry x (and u) vars
  const int t0 = single ? k : 1;      // first modelled timestep

  const bool has_u = spec.kind != ScreenKind::TRUTH;
  if (spec.kind == ScreenKind::TRUTH) {
    if (!spec.truth || spec.truth->ng() != ng || spec.truth->horizon() < k)
      throw ScheduleCoverageError("ground-truth schedule does not cover 1..k");
  }
  if (spec.kind == ScreenKind::PARTIAL) {
    if (!spec.partial || spec.partial->schedule.ng() != ng)
      throw ScheduleCoverageError("partial schedule dimension mismatch");
    for (int t : spec.partial->steps)
      if (t >= 1 && t <= k && spec.partial->schedule.horizon() < t)
        throw ScheduleCoverageError("partial schedule missing step " +
                                    std::to_string(t));
  }
  if (spec.kind == ScreenKind::REGION &&
      (spec.region_r < 0.0 || spec.region_r >= 1.0))
    throw InvalidRangeError("load range r must lie in [0,1)");

  VariableLayout L;
  L.ng = ng; L.nf = nf; L.nb = nb; L.k = k;
  L.f_all_steps = false;
  LinearProgram lp;
  lp.objective_sense = target.sense == BoundSense::UPPER ? Sense::MAX : Sense::MIN;

  // Columns: [u (optional)] [x] [f(k)] [loads (region only)]; u/x blocks span
  // the modelled steps (just step k for the single-step model).
  int next = 0;
  if (has_u) {
    L.u_offset = next;
    next += ng * steps;
  }
  L.x_offset = next;
  next += ng * steps;
  L.f_offset = next;
  next += nf;
  if (spec.kind == ScreenKind::REGION) {
    L.load_offset = next;
    next += nb * steps;
  }
  // For the single-step model the layout indexes timestep k directly.
  const auto ucol = [&](int i, int t) { return L.u_col(i, single ? 1 : t); };
  const auto xcol = [&](int i, int t) { return L.x_col(i, single ? 1 : t); };

  if (has_u)
    for (int t = t0; t <= k; ++t)
      for (int i = 0; i < ng; ++i) lp.add_var(0.0, 1.0, 0.0);
  for (int t = t0; t <= k; ++t)
    for (int i = 0; i < ng; ++i) {
      const auto& g = inst.generators[i];
      if (spec.kind == ScreenKind::TRUTH) {
        const double u = spec.truth->on(i, t) ? 1.0 : 0.0;
        lp.add_var(u * g.p_min, u * g.p_max, 0.0);
      } else {
        lp.add_var(0.0, g.p_max, 0.0);
      }
    }
  for (int c = 0; c < nf; ++c) lp.add_var(-kInf, kInf, 0.0);
  if (spec.kind == ScreenKind::REGION)
    for (int t = t0; t <= k; ++t)
      for (int b = 0; b < nb; ++b) {
        const double nominal = loads.at(b, t);
        lp.add_var((1.0 - spec.region_r) * nominal,
                   (1.0 + spec.region_r) * nominal, 0.0);
      }

  // Objective: the targeted line-flow expression at step k.
  for (int c = 0; c < nf; ++c)
    lp.objective[L.f_col(c, k)] = fm.K(target.line, c);

  // Generation bounds coupled to u (relaxed); ground-truth model fixes them
  // into the x variable bounds above.
  if (spec.kind != ScreenKind::TRUTH) {
    for (int t = t0; t <= k; ++t)
      for (int i = 0; i < ng; ++i) {
        const auto& g = inst.generators[i];
        lp.add_row(0.0, kInf, {{xcol(i, t), 1.0}, {ucol(i, t), -g.p_min}});
        lp.add_row(-kInf, 0.0, {{xcol(i, t), 1.0}, {ucol(i, t), -g.p_max}});
      }
  }

  // Flow bounds at step k only; the targeted sense of the targeted line is
  // removed, its opposite sense is kept.
  for (int j = 0; j < nl; ++j) {
    std::vector<std::pair<int, double>> row;
    for (int c = 0; c < nf; ++c) {
      const double kv = fm.K(j, c);
      if (kv != 0.0) row.emplace_back(L.f_col(c, k), kv);
    }
    double lo = -inst.lines[j].flow_limit, hi = inst.lines[j].flow_limit;
    if (j == target.line) {
      if (target.sense == BoundSense::UPPER) hi = kInf; else lo = -kInf;
    }
    lp.add_row(lo, hi, std::move(row));
  }

  // Nodal balance at step k.
  for (int b = 0; b < nb; ++b) {
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < ng; ++i)
      if (inst.generators[i].bus == b) row.emplace_back(xcol(i, k), 1.0);
    for (int c = 0; c < nf; ++c) {
      const double av = fm.A(b, c);
      if (av != 0.0) row.emplace_back(L.f_col(c, k), -av);
    }
    if (spec.kind == ScreenKind::REGION) {
      row.emplace_back(L.load_col(b, k), -1.0);
      lp.add_row(0.0, 0.0, std::move(row));
    } else {
      const double l = loads.at(b, k);
      lp.add_row(l, l, std::move(row));
    }
  }

  if (!single) {
    // Aggregate energy balance for every earlier step.
    for (int t = 1; t < k; ++t) {
      std::vector<std::pair<int, double>> row;
      for (int i = 0; i < ng; ++i) row.emplace_back(xcol(i, t), 1.0);
      if (spec.kind == ScreenKind::REGION) {
        for (int b = 0; b < nb; ++b) row.emplace_back(L.load_col(b, t), -1.0);
        lp.add_row(0.0, 0.0, std::move(row));
      } else {
        const double total = loads.total(t);
        lp.add_row(total, total, std::move(row));
      }
    }
    // Ramping over all modelled steps.
    detail::RampEmitter ramps{
        inst, L, lp, [&](int gen, int t, double* value) -> int {
          if (spec.kind == ScreenKind::TRUTH) {
            *value = spec.truth->on(gen, t) ? 1.0 : 0.0;
            return -1;
          }
          return L.u_col(gen, t);
        }};
    ramps.emit(k);
    // Partial predictions pin u on the covered steps.
    if (spec.kind == ScreenKind::PARTIAL) {
      for (int t : spec.partial->steps) {
        if (t < 1 || t > k) continue;
        for (int i = 0; i < ng; ++i) {
          const double v = spec.partial->schedule.u(i, t - 1);
          if (v != 0.0 && v != 1.0)
            throw InvalidFixError("partial prediction outside {0,1}");
          const int col = L.u_col(i, t);
          lp.var_lower[col] = lp.var_upper[col] = v;
        }
      }
    }
  }

  if (layout_out) *layout_out = L;
  return lp;
}

}  // namespace detail

// Single-step screening (the standard sample-aware model): one timestep,
// relaxed binaries, no ramping.
inline LinearProgram build_screen_single(const UCInstance& inst,
                                         const LoadProfile& loads,
                                         const ScreeningTarget& target,
                                         const FlowModel& fm,
                                         VariableLayout* layout = nullptr) {
  detail::ScreenSpec spec;
  spec.kind = detail::ScreenKind::SINGLE;
  return detail::build_screen(inst, loads, target, fm, spec, layout);
}

// Multi-step screening with relaxed binaries and ramping over t <= k.
inline LinearProgram build_screen_multi_aware(const UCInstance& inst,
                                              const LoadProfile& loads,
                                              const ScreeningTarget& target,
                                              const FlowModel& fm,
                                              VariableLayout* layout = nullptr) {
  detail::ScreenSpec spec;
  spec.kind = detail::ScreenKind::AWARE;
  return detail::build_screen(inst, loads, target, fm, spec, layout);
}

// Multi-step screening with the full ground-truth commitment substituted.
inline LinearProgram build_screen_truth(const UCInstance& inst,
                                        const LoadProfile& loads,
                                        const ScreeningTarget& target,
                                        const FlowModel& fm,
                                        const CommitmentSchedule& schedule,
                                        VariableLayout* layout = nullptr) {
  detail::ScreenSpec spec;
  spec.kind = detail::ScreenKind::TRUTH;
  spec.truth = &schedule;
  return detail::build_screen(inst, loads, target, fm, spec, layout);
}

// Multi-step screening with predictions pinned on T_pre only.
inline LinearProgram build_screen_partial(const UCInstance& inst,
                                          const LoadProfile& loads,
                                          const ScreeningTarget& target,
                                          const FlowModel& fm,
                                          const PartialSchedule& partial,
                                          VariableLayout* layout = nullptr) {
  detail::ScreenSpec spec;
  spec.kind = detail::ScreenKind::PARTIAL;
  spec.partial = &partial;
  return detail::build_screen(inst, loads, target, fm, spec, layout);
}

// Sample-agnostic screening over the box (1-r) l <= l^r <= (1+r) l.
inline LinearProgram build_screen_region(const UCInstance& inst,
                                         const LoadProfile& nominal_loads,
                                         double r, const ScreeningTarget& target,
                                         const FlowModel& fm,
                                         VariableLayout* layout = nullptr) {
  detail::ScreenSpec spec;
  spec.kind = detail::ScreenKind::REGION;
  spec.region_r = r;
  return detail::build_screen(inst, nominal_loads, target, fm, spec, layout);
}

}  // namespace ucs
