#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "ucs/model.hpp"

namespace ucs {
namespace fixtures {

// ---------------------------------------------------------------------------
// Two-bus system: one generator at the reference bus, one load bus, a single
// line. The smallest system with a nontrivial flow (flow == load).
// ---------------------------------------------------------------------------
inline UCInstance make_fix2() {
  UCInstance inst;
  inst.buses = {{0, true}, {1, false}};
  inst.lines = {{0, 0, 1, 1.0, 100.0}};
  inst.generators = {{0, 0, 10.0, 0.0, 100.0, 100.0, 100.0, 100.0, 100.0,
                      true, 40.0}};
  inst.horizon = 2;
  return inst;
}

inline LoadProfile fix2_loads() {
  LoadProfile l;
  l.values = Matrix(2, 2);
  l.values(1, 0) = 40.0;
  l.values(1, 1) = 50.0;
  return l;
}

// ---------------------------------------------------------------------------
// Three-bus triangle. Two generators (bus 0 cheap, bus 1 expensive with a
// tight ramp-down), one load bus. With loads (60, 35) at bus 2 the line
// 0->2 sits exactly at its 30 MW limit when step 2 is screened in isolation,
// while the ramp-down limit of generator 1 keeps it strictly below the limit
// once step 1 is modelled as well.
//
// With susceptances (5, 1, 5) and dispatch x = (x0, x1) the monitored line
// carries f(0->2) = (6 x0 + x1) / 7; the tests verify this identity
// numerically.
// ---------------------------------------------------------------------------
inline UCInstance make_fixa() {
  UCInstance inst;
  inst.buses = {{0, true}, {1, false}, {2, false}};
  inst.lines = {
      {0, 0, 2, 5.0, 30.0},
      {1, 0, 1, 1.0, 30.0},
      {2, 1, 2, 5.0, 40.0},
  };
  inst.generators = {
      {0, 0, 10.0, 0.0, 35.0, 35.0, 35.0, 35.0, 35.0, true, 30.0},
      {1, 1, 20.0, 0.0, 30.0, 30.0, 15.0, 30.0, 15.0, true, 30.0},
  };
  inst.horizon = 2;
  return inst;
}

inline LoadProfile fixa_loads() {
  LoadProfile l;
  l.values = Matrix(3, 2);
  l.values(2, 0) = 60.0;
  l.values(2, 1) = 35.0;
  return l;
}

// ---------------------------------------------------------------------------
// Six-bus meshed system: 7 lines, 3 generators, loads at three buses.
// Small enough for the exhaustive commitment oracle at T=4 (12 binaries).
// ---------------------------------------------------------------------------
inline UCInstance make_fix6() {
  UCInstance inst;
  inst.buses = {{0, true}, {1, false}, {2, false},
                {3, false}, {4, false}, {5, false}};
  inst.lines = {
      {0, 0, 1, 4.0, 60.0}, {1, 0, 2, 5.0, 70.0}, {2, 1, 3, 3.0, 50.0},
      {3, 2, 3, 4.0, 45.0}, {4, 2, 4, 6.0, 60.0}, {5, 3, 5, 5.0, 55.0},
      {6, 4, 5, 3.0, 40.0},
  };
  inst.generators = {
      {0, 0, 12.0, 10.0, 120.0, 40.0, 40.0, 120.0, 120.0, true, 60.0},
      {1, 1, 18.0, 0.0, 80.0, 25.0, 25.0, 80.0, 80.0, true, 30.0},
      {2, 4, 25.0, 0.0, 60.0, 60.0, 60.0, 60.0, 60.0, false, 0.0},
  };
  inst.horizon = 4;
  return inst;
}

inline LoadProfile fix6_loads() {
  LoadProfile l;
  l.values = Matrix(6, 4);
  const double base2[] = {30.0, 35.0, 40.0, 32.0};
  const double base3[] = {40.0, 48.0, 55.0, 45.0};
  const double base5[] = {25.0, 30.0, 38.0, 28.0};
  for (int t = 0; t < 4; ++t) {
    l.values(2, t) = base2[t];
    l.values(3, t) = base3[t];
    l.values(5, t) = base5[t];
  }
  return l;
}

// ---------------------------------------------------------------------------
// Synthetic 39-bus system. Topology follows the familiar 39-bus/46-branch
// network; susceptances, limits, costs, ramps and loads are invented and
// documented here, so no numeric result on this fixture reproduces any
// published dataset.
//
// Construction of the flow limits: each line's limit is derived from the
// worst-case |flow| that the "proportional dispatch" (every generator at the
// same fraction of p_max) produces over the load box (1 +/- r_max) * nominal.
// Most lines get a loose multiple of that value so the proportional dispatch
// is feasible by construction for any in-box sample; a designated subset is
// tightened toward the nominal operating flow so those bounds stay relevant
// to screening.
// ---------------------------------------------------------------------------
namespace detail39 {

// 46 branches, 0-indexed bus pairs.
inline const std::vector<std::pair<int, int>>& branches() {
  static const std::vector<std::pair<int, int>> b = {
      {0, 1},   {0, 38},  {1, 2},   {1, 24},  {1, 29},  {2, 3},   {2, 17},
      {3, 4},   {3, 13},  {4, 5},   {4, 7},   {5, 6},   {5, 10},  {5, 30},
      {6, 7},   {7, 8},   {8, 38},  {9, 10},  {9, 12},  {9, 31},  {11, 10},
      {11, 12}, {12, 13}, {13, 14}, {14, 15}, {15, 16}, {15, 18}, {15, 20},
      {15, 23}, {16, 17}, {16, 26}, {18, 19}, {18, 32}, {19, 33}, {20, 21},
      {21, 22}, {21, 34}, {22, 23}, {22, 35}, {24, 25}, {24, 36}, {25, 26},
      {25, 27}, {25, 28}, {27, 28}, {28, 37}};
  return b;
}

// Deterministic "varied" susceptances in [3, 9].
inline double susceptance(int j) { return 3.0 + ((5 * j + 2) % 7); }

// Nominal per-bus base demand, MW. Zero at generator buses 29..38 and a few
// pass-through buses; totals about 1090 MW.
inline const std::vector<double>& base_demand() {
  static const std::vector<double> d = {
      0.0,  0.0,  62.0, 48.0, 0.0,  0.0,  45.0, 70.0, 12.0, 0.0,
      0.0,  17.0, 28.0, 0.0,  64.0, 66.0, 0.0,  31.0, 0.0,  124.0,
      55.0, 0.0,  49.0, 62.0, 45.0, 28.0, 56.0, 41.0, 57.0, 0.0,
      0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  0.0,  22.0};
  return d;
}

// Documented daily shape: a sinusoid over the horizon, +/- 12% swing.
inline double load_shape(int t, int horizon) {
  return 1.0 + 0.12 * std::sin(2.0 * 3.14159265358979323846 *
                               (t - 1) / static_cast<double>(horizon));
}

// Lines whose limits are tightened toward the nominal flow. Chosen around
// the heavy corridors feeding the big load at bus 19 and the backbone
// 15-16-17 so screening has genuinely contested bounds.
inline const std::vector<int>& tight_lines() {
  static const std::vector<int> t = {5, 8, 22, 24, 25, 26, 29, 31, 33, 34, 39, 41};
  return t;
}

constexpr double kRMax = 0.8;          // widest load box the fixture supports
constexpr double kLooseFactor = 1.25;  // limit / box-worst-case flow, loose lines
constexpr double kTightFactor = 1.18;  // limit / nominal peak flow, tight lines
constexpr double kTightFloor = 0.45;   // tight limits never drop below this
                                       // fraction of the box worst case

}  // namespace detail39

inline LoadProfile fix39_loads(int horizon = 4) {
  const auto& base = detail39::base_demand();
  LoadProfile l;
  l.values = Matrix(39, horizon);
  for (int t = 1; t <= horizon; ++t) {
    const double s = detail39::load_shape(t, horizon);
    for (int b = 0; b < 39; ++b) l.values(b, t - 1) = base[b] * s;
  }
  return l;
}

inline UCInstance make_fix39() {
  UCInstance inst;
  inst.buses.resize(39);
  for (int b = 0; b < 39; ++b) inst.buses[b] = {b, b == 0};

  const auto& br = detail39::branches();
  for (int j = 0; j < static_cast<int>(br.size()); ++j)
    inst.lines.push_back({j, br[j].first, br[j].second,
                          detail39::susceptance(j), 1.0});  // limits set below

  // Generators at buses 29..38. The first five are cheap with restricted
  // ramps (they cannot move far between steps); the rest are expensive but
  // flexible, which keeps the aggregate ramp capability large.
  const int gen_bus[10] = {29, 30, 31, 32, 33, 34, 35, 36, 37, 38};
  const double pmax[10] = {300, 280, 260, 300, 250, 240, 260, 230, 300, 380};
  const double cost[10] = {10, 11, 12, 13, 14, 26, 29, 32, 36, 40};
  for (int i = 0; i < 10; ++i) {
    const double ramp = (i < 5 ? 0.30 : 0.90) * pmax[i];
    inst.generators.push_back({i, gen_bus[i], cost[i], 0.0, pmax[i], ramp,
                               ramp, pmax[i], pmax[i], true, 0.0});
  }
  inst.horizon = 4;

  // Initial outputs: proportional dispatch of the first-step nominal load.
  const LoadProfile nominal = fix39_loads(inst.horizon);
  const double share0 = nominal.total(1) / inst.total_pmax();
  for (auto& g : inst.generators) g.initial_output = share0 * g.p_max;

  // Flow limits from the proportional-dispatch flow map. For a load vector l
  // the proportional dispatch injects  G w (1^T l) - l  with w_i =
  // p_max_i / sum(p_max); flows are linear in l, so per-line box extremes
  // are exact sums of per-entry extremes.
  const FlowModel fm = build_flow_model(inst);
  const int nb = 39, nl = inst.nl();
  std::vector<double> w(nb, 0.0);
  for (const auto& g : inst.generators)
    w[g.bus] += g.p_max / inst.total_pmax();

  // Column b of the flow map: flows for unit load at bus b.
  Matrix flow_map(nl, nb);
  for (int b = 0; b < nb; ++b) {
    std::vector<double> inj(nb, 0.0);
    for (int bb = 0; bb < nb; ++bb) inj[bb] += w[bb];
    inj[b] -= 1.0;
    const std::vector<double> f = fm.flows_from_injection(inj);
    for (int j = 0; j < nl; ++j) flow_map(j, b) = f[j];
  }

  const auto& base = detail39::base_demand();
  for (int j = 0; j < nl; ++j) {
    double box_worst = 0.0;   // max |flow| over the (1 +/- kRMax) box
    double nominal_peak = 0.0;
    for (int t = 1; t <= inst.horizon; ++t) {
      double hi = 0.0, lo = 0.0, nom = 0.0;
      const double s = detail39::load_shape(t, inst.horizon);
      for (int b = 0; b < nb; ++b) {
        const double c = flow_map(j, b) * base[b] * s;
        hi += std::max(c * (1.0 - detail39::kRMax), c * (1.0 + detail39::kRMax));
        lo += std::min(c * (1.0 - detail39::kRMax), c * (1.0 + detail39::kRMax));
        nom += c;
      }
      box_worst = std::max({box_worst, std::fabs(hi), std::fabs(lo)});
      nominal_peak = std::max(nominal_peak, std::fabs(nom));
    }
    double limit = detail39::kLooseFactor * std::max(box_worst, 1.0);
    for (int tl : detail39::tight_lines())
      if (tl == j)
        limit = std::max(detail39::kTightFactor * nominal_peak,
                         detail39::kTightFloor * box_worst);
    inst.lines[j].flow_limit = std::max(limit, 1.0);
  }
  return inst;
}

}  // namespace fixtures
}  // namespace ucs
