#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ucs/errors.hpp"
#include "ucs/formulation.hpp"
#include "ucs/lp.hpp"
#include "ucs/mip.hpp"
#include "ucs/model.hpp"
#include "ucs/schedule.hpp"

namespace ucs {

enum class MethodKind { SINGLE, MULTI_AWARE, MULTI_TRUTH, MULTI_PARTIAL, REGION };

inline const char* to_string(MethodKind m) {
  switch (m) {
    case MethodKind::SINGLE: return "single";
    case MethodKind::MULTI_AWARE: return "multi";
    case MethodKind::MULTI_TRUTH: return "truth";
    case MethodKind::MULTI_PARTIAL: return "partial";
    case MethodKind::REGION: return "region";
  }
  return "?";
}

struct ScreeningMethod {
  MethodKind kind = MethodKind::MULTI_AWARE;
  CommitmentSchedule schedule;  // MULTI_TRUTH
  PartialSchedule partial;      // MULTI_PARTIAL
  double r = 0.0;               // REGION

  static ScreeningMethod single() { return {MethodKind::SINGLE}; }
  static ScreeningMethod multi_aware() { return {MethodKind::MULTI_AWARE}; }
  static ScreeningMethod multi_truth(CommitmentSchedule s) {
    ScreeningMethod m{MethodKind::MULTI_TRUTH};
    m.schedule = std::move(s);
    return m;
  }
  static ScreeningMethod multi_partial(PartialSchedule p) {
    ScreeningMethod m{MethodKind::MULTI_PARTIAL};
    m.partial = std::move(p);
    return m;
  }
  static ScreeningMethod region(double r) {
    ScreeningMethod m{MethodKind::REGION};
    m.r = r;
    return m;
  }
};

enum class VerdictKind { ELIMINATED, KEPT };

struct Verdict {
  VerdictKind verdict = VerdictKind::KEPT;
  double s_star = 0.0;   // screening objective, NaN when the LP failed
  double bound = 0.0;    // +limit for UPPER, -limit for LOWER
  double margin = 0.0;
  double solve_ms = 0.0;
  std::string note;      // non-empty on infeasible/failed subproblems
};

struct ScreeningResult {
  MethodKind method = MethodKind::MULTI_AWARE;
  double region_r = 0.0;
  std::map<ScreeningTarget, Verdict> verdicts;
  double total_ms = 0.0;

  int eliminated_count() const {
    int n = 0;
    for (const auto& [t, v] : verdicts)
      if (v.verdict == VerdictKind::ELIMINATED) ++n;
    return n;
  }
  int kept_count() const { return static_cast<int>(verdicts.size()) - eliminated_count(); }

  std::set<ScreeningTarget> eliminated_set() const {
    std::set<ScreeningTarget> s;
    for (const auto& [t, v] : verdicts)
      if (v.verdict == VerdictKind::ELIMINATED) s.insert(t);
    return s;
  }
};

struct ReducedInstance {
  UCInstance base;
  std::set<ScreeningTarget> kept_targets;
};

// ELIMINATED needs the screening optimum to clear the bound by a relative
// margin that dominates the LP feasibility tolerance.
inline double verdict_margin(double flow_limit) {
  return 1e-5 * std::max(1.0, flow_limit);
}

inline std::vector<ScreeningTarget> all_targets(const UCInstance& inst) {
  std::vector<ScreeningTarget> ts;
  ts.reserve(static_cast<std::size_t>(2) * inst.nl() * inst.horizon);
  for (int t = 1; t <= inst.horizon; ++t)
    for (int j = 0; j < inst.nl(); ++j) {
      ts.push_back({j, BoundSense::UPPER, t});
      ts.push_back({j, BoundSense::LOWER, t});
    }
  return ts;
}

// Rolling-horizon sweep: for each step k = 1..T screen both senses of every
// line with the chosen model. Solver failures and infeasible subproblems are
// conservative KEPT verdicts, never aborts.
inline ScreeningResult screen(const UCInstance& inst, const LoadProfile& loads,
                              const ScreeningMethod& method,
                              const LPOptions& lp_opt = {},
                              const FlowModel* fm_in = nullptr) {
  FlowModel local;
  const FlowModel* fm = fm_in;
  if (!fm) {
    local = build_flow_model(inst);
    fm = &local;
  }
  ScreeningResult result;
  result.method = method.kind;
  result.region_r = method.r;
  const auto t_start = std::chrono::steady_clock::now();

  for (const ScreeningTarget& target : all_targets(inst)) {
    const double limit = inst.lines[target.line].flow_limit;
    Verdict v;
    v.bound = target.sense == BoundSense::UPPER ? limit : -limit;
    v.margin = verdict_margin(limit);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      LinearProgram lp;
      switch (method.kind) {
        case MethodKind::SINGLE:
          lp = build_screen_single(inst, loads, target, *fm);
          break;
        case MethodKind::MULTI_AWARE:
          lp = build_screen_multi_aware(inst, loads, target, *fm);
          break;
        case MethodKind::MULTI_TRUTH:
          lp = build_screen_truth(inst, loads, target, *fm, method.schedule);
          break;
        case MethodKind::MULTI_PARTIAL:
          lp = build_screen_partial(inst, loads, target, *fm, method.partial);
          break;
        case MethodKind::REGION:
          lp = build_screen_region(inst, loads, method.r, target, *fm);
          break;
      }
      LPSolution sol = solve_lp(lp, lp_opt);
      if (sol.status == LPStatus::OPTIMAL) {
        v.s_star = sol.objective_value;
        const bool inactive = target.sense == BoundSense::UPPER
                                  ? v.s_star <= limit - v.margin
                                  : v.s_star >= -limit + v.margin;
        v.verdict = inactive ? VerdictKind::ELIMINATED : VerdictKind::KEPT;
      } else if (sol.status == LPStatus::UNBOUNDED) {
        v.s_star = target.sense == BoundSense::UPPER ? kInf : -kInf;
        v.verdict = VerdictKind::KEPT;
        v.note = "unbounded";
      } else {
        v.s_star = std::numeric_limits<double>::quiet_NaN();
        v.verdict = VerdictKind::KEPT;
        v.note = "infeasible";
      }
    } catch (const Error& e) {
      v.s_star = std::numeric_limits<double>::quiet_NaN();
      v.verdict = VerdictKind::KEPT;
      v.note = std::string("error: ") + e.what();
    }
    v.solve_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
    result.verdicts.emplace(target, v);
  }
  result.total_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t_start)
                        .count();
  return result;
}

inline ReducedInstance reduce(const UCInstance& inst, const ScreeningResult& result) {
  const auto universe = all_targets(inst);
  if (result.verdicts.size() != universe.size())
    throw CoverageError("screening result does not cover every target");
  for (const auto& t : universe)
    if (!result.verdicts.count(t))
      throw CoverageError("missing verdict for a target");
  ReducedInstance red;
  red.base = inst;
  for (const auto& [t, v] : result.verdicts)
    if (v.verdict == VerdictKind::KEPT) red.kept_targets.insert(t);
  return red;
}

// Builds the UC MILP with eliminated line-bound senses relaxed away.
inline UCProblem build_reduced_uc(const ReducedInstance& red, const LoadProfile& loads,
                                  const PartialSchedule* fixed_u = nullptr) {
  UCProblem prob = build_uc(red.base, loads, red.base.horizon, fixed_u);
  for (const auto& target : all_targets(red.base)) {
    if (red.kept_targets.count(target)) continue;
    const int row = prob.flow_row_index(target.line, target.timestep);
    if (target.sense == BoundSense::UPPER)
      prob.mip.base.row_upper[row] = kInf;
    else
      prob.mip.base.row_lower[row] = -kInf;
  }
  return prob;
}

inline MIPSolution solve_reduced(const ReducedInstance& red, const LoadProfile& loads,
                                 const MIPOptions& opt = {},
                                 const PartialSchedule* fixed_u = nullptr) {
  UCProblem prob = build_reduced_uc(red, loads, fixed_u);
  return solve_mip(prob.mip, opt);
}

// Reads the commitment block out of a solved UC MILP.
inline CommitmentSchedule extract_schedule(const MIPSolution& sol,
                                           const VariableLayout& layout) {
  if (sol.status != MIPStatus::OPTIMAL)
    throw NotOptimalError("cannot extract a schedule from a non-optimal solution");
  CommitmentSchedule s;
  s.provenance = Provenance::SOLVED;
  s.u = Matrix(layout.ng, layout.k);
  for (int t = 1; t <= layout.k; ++t)
    for (int i = 0; i < layout.ng; ++i)
      s.u(i, t - 1) = sol.primal[layout.u_col(i, t)] > 0.5 ? 1.0 : 0.0;
  return s;
}

struct ComparisonReport {
  bool a_subset_of_b = false;  // eliminated(a) contained in eliminated(b)
  bool b_subset_of_a = false;
  std::vector<ScreeningTarget> only_a, only_b;
  std::map<int, std::pair<int, int>> eliminated_per_step;  // step -> (a, b)

  bool identical() const { return only_a.empty() && only_b.empty(); }
};

inline ComparisonReport compare_results(const ScreeningResult& a,
                                        const ScreeningResult& b) {
  if (a.verdicts.size() != b.verdicts.size())
    throw UniverseMismatchError("screening results cover different targets");
  for (const auto& [t, v] : a.verdicts)
    if (!b.verdicts.count(t))
      throw UniverseMismatchError("screening results cover different targets");
  ComparisonReport rep;
  const auto ea = a.eliminated_set();
  const auto eb = b.eliminated_set();
  for (const auto& t : ea)
    if (!eb.count(t)) rep.only_a.push_back(t);
  for (const auto& t : eb)
    if (!ea.count(t)) rep.only_b.push_back(t);
  rep.a_subset_of_b = rep.only_a.empty();
  rep.b_subset_of_a = rep.only_b.empty();
  for (const auto& t : ea) rep.eliminated_per_step[t.timestep].first++;
  for (const auto& t : eb) rep.eliminated_per_step[t.timestep].second++;
  return rep;
}

// Human-readable verdict table: (timestep, line, sense, S*, bound, verdict,
// solve_ms), timestep-major, line-minor, upper before lower.
inline std::string verdict_table(const ScreeningResult& result) {
  std::ostringstream out;
  out << "timestep line sense s_star bound verdict solve_ms\n";
  out.precision(10);
  // std::map orders by (line, sense, timestep); re-emit in sweep order.
  std::vector<std::pair<ScreeningTarget, Verdict>> rows(result.verdicts.begin(),
                                                        result.verdicts.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    const auto ka = std::tuple(a.first.timestep, a.first.line, a.first.sense);
    const auto kb = std::tuple(b.first.timestep, b.first.line, b.first.sense);
    return ka < kb;
  });
  for (const auto& [t, v] : rows) {
    out << t.timestep << ' ' << t.line << ' ' << to_string(t.sense) << ' '
        << v.s_star << ' ' << v.bound << ' '
        << (v.verdict == VerdictKind::ELIMINATED ? "ELIMINATED" : "KEPT") << ' '
        << v.solve_ms << '\n';
  }
  return out.str();
}

inline constexpr int kVerdictSchemaVersion = 1;

inline nlohmann::json verdicts_to_json(const ScreeningResult& result) {
  nlohmann::json doc;
  doc["schema_version"] = kVerdictSchemaVersion;
  doc["method"] = to_string(result.method);
  if (result.method == MethodKind::REGION) doc["r"] = result.region_r;
  doc["eliminated"] = result.eliminated_count();
  doc["kept"] = result.kept_count();
  auto arr = nlohmann::json::array();
  for (const auto& [t, v] : result.verdicts) {
    nlohmann::json jv{{"timestep", t.timestep},
                      {"line", t.line},
                      {"sense", to_string(t.sense)},
                      {"bound", v.bound},
                      {"verdict", v.verdict == VerdictKind::ELIMINATED
                                      ? "ELIMINATED"
                                      : "KEPT"},
                      {"solve_ms", v.solve_ms}};
    if (std::isfinite(v.s_star)) jv["s_star"] = v.s_star;
    if (!v.note.empty()) jv["note"] = v.note;
    arr.push_back(jv);
  }
  doc["verdicts"] = arr;
  return doc;
}

inline ScreeningResult verdicts_from_json(const nlohmann::json& doc) {
  if (!doc.contains("schema_version") ||
      doc["schema_version"].get<int>() != kVerdictSchemaVersion)
    throw SchemaError("unsupported verdict schema version");
  ScreeningResult result;
  const std::string m = doc.value("method", "multi");
  for (MethodKind k : {MethodKind::SINGLE, MethodKind::MULTI_AWARE,
                       MethodKind::MULTI_TRUTH, MethodKind::MULTI_PARTIAL,
                       MethodKind::REGION})
    if (m == to_string(k)) result.method = k;
  result.region_r = doc.value("r", 0.0);
  for (const auto& jv : doc.at("verdicts")) {
    ScreeningTarget t;
    t.timestep = jv.at("timestep").get<int>();
    t.line = jv.at("line").get<int>();
    t.sense = jv.at("sense").get<std::string>() == "upper" ? BoundSense::UPPER
                                                           : BoundSense::LOWER;
    Verdict v;
    v.bound = jv.value("bound", 0.0);
    v.s_star = jv.contains("s_star")
                   ? jv["s_star"].get<double>()
                   : std::numeric_limits<double>::quiet_NaN();
    v.verdict = jv.at("verdict").get<std::string>() == "ELIMINATED"
                    ? VerdictKind::ELIMINATED
                    : VerdictKind::KEPT;
    v.note = jv.value("note", "");
    result.verdicts.emplace(t, v);
  }
  return result;
}

}  // namespace ucs
