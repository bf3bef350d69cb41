#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ucs/errors.hpp"
#include "ucs/formulation.hpp"
#include "ucs/lp.hpp"
#include "ucs/mip.hpp"
#include "ucs/model.hpp"
#include "ucs/predictor.hpp"
#include "ucs/rng.hpp"
#include "ucs/schedule.hpp"
#include "ucs/screening.hpp"

namespace ucs {

// ---------------------------------------------------------------------------
// Load sampling
// ---------------------------------------------------------------------------

// Draws `count` profiles with every entry independent uniform in
// [(1-r) nominal, (1+r) nominal]. Each sample uses its own derived RNG
// stream so the i-th sample is the same regardless of count.
inline std::vector<LoadProfile> gen_samples(const LoadProfile& nominal, double r,
                                            int count, std::uint64_t seed) {
  if (r < 0.0 || r >= 1.0) throw InvalidRangeError("load range r must lie in [0,1)");
  if (count < 1) throw InvalidRangeError("sample count must be >= 1");
  std::vector<LoadProfile> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(s));
    LoadProfile p = nominal;
    for (int b = 0; b < nominal.nb(); ++b)
      for (int t = 0; t < nominal.horizon(); ++t) {
        const double v = nominal.values(b, t);
        p.values(b, t) = rng.uniform((1.0 - r) * v, (1.0 + r) * v);
      }
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force oracles
// ---------------------------------------------------------------------------

struct OracleUCResult {
  bool feasible = false;
  double objective = 0.0;
  CommitmentSchedule schedule;
  std::vector<double> dispatch;  // x block, timestep-major
  long patterns_tried = 0;
  bool unique_commitment = true;  // no other pattern ties the optimum
};

inline constexpr int kOracleMaxBinaries = 16;

// Exhaustive enumeration over all 2^(ng*T) commitment patterns; each
// feasible pattern is priced by an LP with the commitment substituted.
inline OracleUCResult oracle_uc(const UCInstance& inst, const LoadProfile& loads,
                                const LPOptions& lp_opt = {}) {
  const int ng = inst.ng(), T = inst.horizon;
  const int nbits = ng * T;
  if (nbits > kOracleMaxBinaries)
    throw TooLargeError("exhaustive oracle limited to " +
                        std::to_string(kOracleMaxBinaries) + " binaries");

  const FlowModel fm = build_flow_model(inst);
  UCProblem prob = build_uc(inst, loads, T, nullptr, &fm);
  const VariableLayout& L = prob.layout;

  OracleUCResult best;
  const double tie_tol = 1e-7;
  for (std::uint64_t mask = 0; mask < (1ULL << nbits); ++mask) {
    // Cheap necessary condition per step: committed capacity covers the
    // load and committed minimums do not exceed it.
    bool plausible = true;
    for (int t = 1; t <= T && plausible; ++t) {
      double cap = 0.0, floor_sum = 0.0;
      for (int i = 0; i < ng; ++i)
        if (mask >> ((t - 1) * ng + i) & 1) {
          cap += inst.generators[i].p_max;
          floor_sum += inst.generators[i].p_min;
        }
      const double need = loads.total(t);
      if (cap < need - 1e-9 || floor_sum > need + 1e-9) plausible = false;
    }
    if (!plausible) continue;

    LinearProgram lp = prob.mip.base;
    for (int t = 1; t <= T; ++t)
      for (int i = 0; i < ng; ++i) {
        const double v = (mask >> ((t - 1) * ng + i) & 1) ? 1.0 : 0.0;
        const int col = L.u_col(i, t);
        lp.var_lower[col] = lp.var_upper[col] = v;
      }
    ++best.patterns_tried;
    const LPSolution sol = solve_lp(lp, lp_opt);
    if (sol.status != LPStatus::OPTIMAL) continue;
    if (!best.feasible || sol.objective_value < best.objective - tie_tol) {
      best.feasible = true;
      best.objective = sol.objective_value;
      best.unique_commitment = true;
      best.schedule.provenance = Provenance::SOLVED;
      best.schedule.u = Matrix(ng, T);
      for (int t = 1; t <= T; ++t)
        for (int i = 0; i < ng; ++i)
          best.schedule.u(i, t - 1) = (mask >> ((t - 1) * ng + i) & 1) ? 1.0 : 0.0;
      best.dispatch.assign(static_cast<std::size_t>(ng) * T, 0.0);
      for (int t = 1; t <= T; ++t)
        for (int i = 0; i < ng; ++i)
          best.dispatch[(t - 1) * ng + i] = sol.primal[L.x_col(i, t)];
    } else if (sol.objective_value < best.objective + tie_tol) {
      best.unique_commitment = false;
    }
  }
  return best;
}

struct OracleBindingResult {
  bool region_empty = false;  // whole UC feasible region infeasible
  double value = 0.0;         // achieved optimum of the target expression
  double certified_bound = 0.0;  // dual bound: >= value for UPPER, <= for LOWER
  long nodes = 0;
};

// Optimizes the targeted line-flow expression over the FULL binary-feasible
// UC region with only the targeted bound removed. The branch-and-bound dual
// bound certifies eliminations even when the gap limit is hit.
inline OracleBindingResult oracle_binding(const UCInstance& inst,
                                          const LoadProfile& loads,
                                          const ScreeningTarget& target,
                                          const MIPOptions& opt = {}) {
  const FlowModel fm = build_flow_model(inst);
  if (target.line < 0 || target.line >= inst.nl())
    throw DimensionError("target line out of range");
  if (target.timestep < 1 || target.timestep > inst.horizon)
    throw DimensionError("target timestep out of range");

  UCProblem prob = build_uc(inst, loads, inst.horizon, nullptr, &fm);
  LinearProgram& lp = prob.mip.base;
  std::fill(lp.objective.begin(), lp.objective.end(), 0.0);
  for (int c = 0; c < prob.layout.nf; ++c)
    lp.objective[prob.layout.f_col(c, target.timestep)] = fm.K(target.line, c);
  lp.objective_sense =
      target.sense == BoundSense::UPPER ? Sense::MAX : Sense::MIN;

  const int row = prob.flow_row_index(target.line, target.timestep);
  if (target.sense == BoundSense::UPPER)
    lp.row_upper[row] = kInf;
  else
    lp.row_lower[row] = -kInf;

  const MIPSolution sol = solve_mip(prob.mip, opt);
  OracleBindingResult out;
  out.nodes = sol.nodes;
  if (sol.status == MIPStatus::INFEASIBLE) {
    out.region_empty = true;
    return out;
  }
  out.value = sol.objective_value;
  out.certified_bound = sol.bound;
  return out;
}

// Certifies one ELIMINATED verdict: the oracle's dual bound must respect the
// removed limit within tolerance. KEPT verdicts are vacuously certified.
inline bool certify_elimination(const UCInstance& inst, const LoadProfile& loads,
                                const ScreeningTarget& target,
                                const MIPOptions& opt = {},
                                double* oracle_bound = nullptr) {
  const OracleBindingResult res = oracle_binding(inst, loads, target, opt);
  if (res.region_empty) return true;
  const double limit = inst.lines[target.line].flow_limit;
  const double tol = 1e-6 * std::max(1.0, limit);
  if (oracle_bound) *oracle_bound = res.certified_bound;
  return target.sense == BoundSense::UPPER
             ? res.certified_bound <= limit + tol
             : res.certified_bound >= -limit - tol;
}

// Checks a full-problem primal vector against every original line bound.
inline bool respects_all_flow_bounds(const UCInstance& inst, const UCProblem& prob,
                                     const std::vector<double>& primal,
                                     double tol_scale = 1e-6) {
  const FlowModel fm = build_flow_model(inst);
  for (int t = 1; t <= prob.layout.k; ++t)
    for (int j = 0; j < inst.nl(); ++j) {
      double flow = 0.0;
      for (int c = 0; c < prob.layout.nf; ++c)
        flow += fm.K(j, c) * primal[prob.layout.f_col(c, t)];
      const double lim = inst.lines[j].flow_limit;
      if (std::fabs(flow) > lim + tol_scale * std::max(1.0, lim)) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// Random feasible instances (property tests)
// ---------------------------------------------------------------------------

// Connected random network with limits sized from a feasible reference
// dispatch, so the nominal loads always admit a solution; a fraction of the
// line limits is left snug to keep screening verdicts mixed.
inline UCInstance gen_random_instance(Rng& rng, int nb, int ng, int T,
                                      LoadProfile* loads_out) {
  UCInstance inst;
  inst.horizon = T;
  inst.buses.resize(nb);
  for (int b = 0; b < nb; ++b) inst.buses[b] = {b, b == 0};

  // Spanning tree plus a few extra edges.
  int lid = 0;
  for (int b = 1; b < nb; ++b) {
    const int parent = rng.uniform_int(0, b - 1);
    inst.lines.push_back({lid++, parent, b, rng.uniform(1.0, 8.0), 1.0});
  }
  const int extra = rng.uniform_int(0, nb - 1);
  for (int e = 0; e < extra; ++e) {
    const int a = rng.uniform_int(0, nb - 1);
    const int b = rng.uniform_int(0, nb - 1);
    if (a == b) continue;
    bool dup = false;
    for (const auto& l : inst.lines)
      if ((l.from_bus == a && l.to_bus == b) || (l.from_bus == b && l.to_bus == a))
        dup = true;
    if (dup) continue;
    inst.lines.push_back({lid++, a, b, rng.uniform(1.0, 8.0), 1.0});
  }

  for (int i = 0; i < ng; ++i) {
    Generator g;
    g.id = i;
    g.bus = i == 0 ? 0 : rng.uniform_int(0, nb - 1);
    g.cost = rng.uniform(5.0, 40.0);
    g.p_max = rng.uniform(40.0, 120.0);
    g.p_min = rng.uniform01() < 0.3 ? rng.uniform(0.0, 0.2 * g.p_max) : 0.0;
    const double ramp = rng.uniform(0.2, 1.0) * g.p_max;
    g.ramp_up = g.ramp_down = ramp;
    g.ramp_startup = g.ramp_shutdown = g.p_max;
    g.initial_on = true;
    inst.generators.push_back(g);
  }

  // Loads: total well inside capacity, spread over non-generator buses too.
  LoadProfile loads;
  loads.values = Matrix(nb, T);
  const double cap = inst.total_pmax();
  for (int t = 0; t < T; ++t) {
    double total = rng.uniform(0.3, 0.6) * cap;
    std::vector<double> weights(nb);
    double wsum = 0.0;
    for (int b = 0; b < nb; ++b) {
      weights[b] = rng.uniform01();
      wsum += weights[b];
    }
    for (int b = 0; b < nb; ++b) loads.values(b, t) = total * weights[b] / wsum;
  }
  // Ensure committed minimums can always be met.
  double pmin_sum = 0.0;
  for (const auto& g : inst.generators) pmin_sum += g.p_min;
  for (int t = 1; t <= T; ++t)
    if (loads.total(t) < pmin_sum) {
      const double scale = (pmin_sum + 1.0) / std::max(loads.total(t), 1e-9);
      for (int b = 0; b < nb; ++b) loads.values(b, t - 1) *= scale;
    }

  // Initial outputs follow the proportional dispatch of step 1.
  const double share = loads.total(1) / cap;
  for (auto& g : inst.generators)
    g.initial_output = std::clamp(share * g.p_max, g.p_min, g.p_max);

  // Limits from the proportional-dispatch flows (feasible by construction),
  // scaled between snug and loose.
  const FlowModel fm = build_flow_model(inst);
  std::vector<double> peak(inst.nl(), 0.0);
  for (int t = 1; t <= T; ++t) {
    std::vector<double> inj(nb, 0.0);
    const double frac = loads.total(t) / cap;
    for (const auto& g : inst.generators) inj[g.bus] += frac * g.p_max;
    for (int b = 0; b < nb; ++b) inj[b] -= loads.at(b, t);
    const std::vector<double> f = fm.flows_from_injection(inj);
    for (int j = 0; j < inst.nl(); ++j)
      peak[j] = std::max(peak[j], std::fabs(f[j]));
  }
  for (int j = 0; j < inst.nl(); ++j) {
    const double factor = rng.uniform01() < 0.4 ? rng.uniform(1.05, 1.3)
                                                : rng.uniform(1.8, 4.0);
    inst.lines[j].flow_limit = std::max(factor * peak[j], 1.0);
  }
  if (loads_out) *loads_out = loads;
  validate(inst);
  return inst;
}

// ---------------------------------------------------------------------------
// Experiment runner
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  UCInstance instance;
  LoadProfile nominal;
  std::vector<double> r_values = {0.5};
  int sample_count = 10;
  std::vector<MethodKind> methods = {MethodKind::SINGLE, MethodKind::MULTI_AWARE};
  std::uint64_t seed = 1;
  bool oracle_enabled = false;
  // Partial-prediction settings (MULTI_PARTIAL only).
  int knn_k = 5;
  int knn_interval = 4;
  int knn_training_samples = 0;  // 0 disables MULTI_PARTIAL
  MIPOptions mip;
  LPOptions lp;

  void check() const {
    for (double r : r_values)
      if (r < 0.0 || r >= 1.0) throw InvalidRangeError("r values must lie in [0,1)");
    if (sample_count < 1) throw InvalidRangeError("sample count must be >= 1");
  }
};

struct MethodRunMetrics {
  MethodKind method = MethodKind::SINGLE;
  double r = 0.0;
  int samples = 0;
  std::vector<int> remaining_counts;  // per sample (one entry for REGION)
  double mean_remaining = 0.0;
  double screening_rate = 0.0;  // 1 - mean_remaining / (2 m T)
  int full_feasible = 0;
  int reduced_feasible = 0;
  double mean_objective_gap = 0.0;  // relative, over samples feasible both ways
  double mean_full_ms = 0.0;
  double mean_reduced_ms = 0.0;
  double mean_screen_ms = 0.0;
  int oracle_checked = 0;
  int oracle_failures = 0;
};

struct MetricsReport {
  int total_constraints = 0;  // 2 m T
  std::vector<MethodRunMetrics> methods;
  // (method a, method b, r) -> samples where eliminated(a) subset of eliminated(b)
  std::map<std::string, int> inclusion_pass;
  std::map<std::string, int> inclusion_total;
  std::vector<std::string> sample_errors;
};

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace detail

inline MetricsReport run_experiment(const ExperimentConfig& cfg) {
  cfg.check();
  validate(cfg.instance);
  MetricsReport report;
  const int universe =
      2 * cfg.instance.nl() * cfg.instance.horizon;
  report.total_constraints = universe;
  const FlowModel fm = build_flow_model(cfg.instance);

  // Optional KNN model for the partial-prediction method.
  std::optional<KNNModel> knn;
  const bool wants_partial =
      std::count(cfg.methods.begin(), cfg.methods.end(), MethodKind::MULTI_PARTIAL) > 0;
  if (wants_partial) {
    if (cfg.knn_training_samples < cfg.knn_k)
      throw EmptyTrainingError("partial method needs knn_training_samples >= K");
    TrainingSet ts;
    const auto train_loads =
        gen_samples(cfg.nominal, 0.5, cfg.knn_training_samples, cfg.seed ^ 0x7261696eULL);
    for (const auto& l : train_loads) {
      try {
        UCProblem prob = build_uc(cfg.instance, l, cfg.instance.horizon, nullptr, &fm);
        MIPSolution sol = solve_mip(prob.mip, cfg.mip);
        if (sol.status != MIPStatus::OPTIMAL) continue;
        ts.loads.push_back(l);
        ts.schedules.push_back(extract_schedule(sol, prob.layout));
      } catch (const Error& e) {
        report.sample_errors.push_back(std::string("training: ") + e.what());
      }
    }
    knn = train(ts, cfg.knn_k);
  }

  for (double r : cfg.r_values) {
    const auto samples = gen_samples(cfg.nominal, r, cfg.sample_count, cfg.seed);
    // Per-sample eliminated sets per method, for inclusion accounting.
    std::map<MethodKind, std::vector<std::set<ScreeningTarget>>> eliminated;

    for (MethodKind mk : cfg.methods) {
      MethodRunMetrics m;
      m.method = mk;
      m.r = r;

      if (mk == MethodKind::REGION) {
        const auto t0 = std::chrono::steady_clock::now();
        const ScreeningResult res =
            screen(cfg.instance, cfg.nominal, ScreeningMethod::region(r), cfg.lp, &fm);
        m.mean_screen_ms = detail::ms_since(t0);
        m.samples = 1;
        m.remaining_counts.push_back(res.kept_count());
        eliminated[mk].assign(cfg.sample_count, res.eliminated_set());
        if (cfg.oracle_enabled &&
            cfg.instance.ng() * cfg.instance.horizon <= kOracleMaxBinaries) {
          for (const auto& tgt : res.eliminated_set()) {
            ++m.oracle_checked;
            // A region elimination must hold for the nominal sample too.
            if (!certify_elimination(cfg.instance, cfg.nominal, tgt, cfg.mip))
              ++m.oracle_failures;
          }
        }
      } else {
        double gap_sum = 0.0;
        int gap_n = 0;
        for (int s = 0; s < cfg.sample_count; ++s) {
          try {
            const LoadProfile& l = samples[s];
            ScreeningMethod method = ScreeningMethod::single();
            PartialSchedule partial;
            switch (mk) {
              case MethodKind::SINGLE:
                method = ScreeningMethod::single();
                break;
              case MethodKind::MULTI_AWARE:
                method = ScreeningMethod::multi_aware();
                break;
              case MethodKind::MULTI_PARTIAL:
                partial = partial_schedule(predict(*knn, l), cfg.knn_interval);
                method = ScreeningMethod::multi_partial(partial);
                break;
              default:
                throw ValidationError("unsupported method in experiment");
            }
            const auto ts = std::chrono::steady_clock::now();
            const ScreeningResult res = screen(cfg.instance, l, method, cfg.lp, &fm);
            m.mean_screen_ms += detail::ms_since(ts);
            m.remaining_counts.push_back(res.kept_count());
            eliminated[mk].push_back(res.eliminated_set());

            // Full problem.
            const auto tf = std::chrono::steady_clock::now();
            UCProblem full = build_uc(cfg.instance, l, cfg.instance.horizon, nullptr, &fm);
            const MIPSolution full_sol = solve_mip(full.mip, cfg.mip);
            m.mean_full_ms += detail::ms_since(tf);
            if (full_sol.status == MIPStatus::OPTIMAL) ++m.full_feasible;

            // Reduced problem; partial predictions are pinned in the MILP.
            const ReducedInstance red = reduce(cfg.instance, res);
            const auto tr = std::chrono::steady_clock::now();
            const MIPSolution red_sol =
                solve_reduced(red, l, cfg.mip,
                              mk == MethodKind::MULTI_PARTIAL ? &partial : nullptr);
            m.mean_reduced_ms += detail::ms_since(tr);
            if (red_sol.status == MIPStatus::OPTIMAL) ++m.reduced_feasible;

            if (full_sol.status == MIPStatus::OPTIMAL &&
                red_sol.status == MIPStatus::OPTIMAL) {
              gap_sum += std::fabs(red_sol.objective_value - full_sol.objective_value) /
                         std::max(1.0, std::fabs(full_sol.objective_value));
              ++gap_n;
            }

            if (cfg.oracle_enabled &&
                cfg.instance.ng() * cfg.instance.horizon <= kOracleMaxBinaries &&
                mk != MethodKind::MULTI_PARTIAL) {
              for (const auto& tgt : res.eliminated_set()) {
                ++m.oracle_checked;
                if (!certify_elimination(cfg.instance, l, tgt, cfg.mip))
                  ++m.oracle_failures;
              }
            }
            ++m.samples;
          } catch (const Error& e) {
            std::ostringstream msg;
            msg << to_string(mk) << " r=" << r << " sample=" << s << ": " << e.what();
            report.sample_errors.push_back(msg.str());
            eliminated[mk].push_back({});
          }
        }
        if (gap_n > 0) m.mean_objective_gap = gap_sum / gap_n;
        if (m.samples > 0) {
          m.mean_full_ms /= m.samples;
          m.mean_reduced_ms /= m.samples;
          m.mean_screen_ms /= m.samples;
        }
      }

      double rem = 0.0;
      for (int c : m.remaining_counts) rem += c;
      if (!m.remaining_counts.empty()) rem /= m.remaining_counts.size();
      m.mean_remaining = rem;
      m.screening_rate = 1.0 - rem / universe;
      report.methods.push_back(std::move(m));
    }

    // Inclusion accounting: single's eliminations inside multi's, and every
    // method's inside the sample-agnostic region result.
    auto record_inclusion = [&](MethodKind a, MethodKind b) {
      if (!eliminated.count(a) || !eliminated.count(b)) return;
      const auto& ea = eliminated[a];
      const auto& eb = eliminated[b];
      const std::size_t n = std::min(ea.size(), eb.size());
      std::ostringstream key;
      key << to_string(a) << "<=" << to_string(b) << "@r=" << r;
      for (std::size_t s = 0; s < n; ++s) {
        ++report.inclusion_total[key.str()];
        if (std::includes(eb[s].begin(), eb[s].end(), ea[s].begin(), ea[s].end()))
          ++report.inclusion_pass[key.str()];
      }
    };
    record_inclusion(MethodKind::SINGLE, MethodKind::MULTI_AWARE);
    record_inclusion(MethodKind::REGION, MethodKind::SINGLE);
    record_inclusion(MethodKind::REGION, MethodKind::MULTI_AWARE);
  }
  return report;
}

inline constexpr int kReportSchemaVersion = 1;

inline nlohmann::json report_to_json(const MetricsReport& rep) {
  nlohmann::json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["total_constraints"] = rep.total_constraints;
  auto arr = nlohmann::json::array();
  for (const auto& m : rep.methods) {
    nlohmann::json jm;
    jm["method"] = to_string(m.method);
    jm["r"] = m.r;
    jm["samples"] = m.samples;
    jm["remaining_counts"] = m.remaining_counts;
    jm["mean_remaining"] = m.mean_remaining;
    jm["screening_rate"] = m.screening_rate;
    jm["full_feasible"] = m.full_feasible;
    jm["reduced_feasible"] = m.reduced_feasible;
    jm["mean_objective_gap"] = m.mean_objective_gap;
    jm["mean_full_ms"] = m.mean_full_ms;
    jm["mean_reduced_ms"] = m.mean_reduced_ms;
    jm["mean_screen_ms"] = m.mean_screen_ms;
    jm["oracle_checked"] = m.oracle_checked;
    jm["oracle_failures"] = m.oracle_failures;
    arr.push_back(jm);
  }
  doc["methods"] = arr;
  nlohmann::json inc;
  for (const auto& [k, total] : rep.inclusion_total) {
    inc[k] = {{"pass", rep.inclusion_pass.count(k) ? rep.inclusion_pass.at(k) : 0},
              {"total", total}};
  }
  doc["inclusions"] = inc;
  doc["errors"] = rep.sample_errors;
  return doc;
}

inline std::string report_table(const MetricsReport& rep) {
  std::ostringstream out;
  out << "method r samples mean_remaining screening_rate full_feasible "
         "reduced_feasible mean_gap full_ms reduced_ms screen_ms oracle\n";
  out.precision(6);
  for (const auto& m : rep.methods) {
    out << to_string(m.method) << ' ' << m.r << ' ' << m.samples << ' '
        << m.mean_remaining << ' ' << m.screening_rate << ' ' << m.full_feasible
        << ' ' << m.reduced_feasible << ' ' << m.mean_objective_gap << ' '
        << m.mean_full_ms << ' ' << m.mean_reduced_ms << ' ' << m.mean_screen_ms
        << ' ' << m.oracle_checked - m.oracle_failures << '/' << m.oracle_checked
        << '\n';
  }
  for (const auto& [k, total] : rep.inclusion_total) {
    const int pass = rep.inclusion_pass.count(k) ? rep.inclusion_pass.at(k) : 0;
    out << "inclusion " << k << ' ' << pass << '/' << total << '\n';
  }
  for (const auto& e : rep.sample_errors) out << "error " << e << '\n';
  return out.str();
}

}  // namespace ucs
