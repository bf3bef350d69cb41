#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "ucs/dense.hpp"
#include "ucs/errors.hpp"

namespace ucs {

struct Bus {
  int id = 0;
  bool is_reference = false;

  bool operator==(const Bus&) const = default;
};

struct Line {
  int id = 0;
  int from_bus = 0;
  int to_bus = 0;
  double susceptance = 0.0;  // per unit, > 0
  double flow_limit = 0.0;   // MW, finite and > 0

  bool operator==(const Line&) const = default;
};

struct Generator {
  int id = 0;
  int bus = 0;
  double cost = 0.0;   // $/MWh
  double p_min = 0.0;  // MW
  double p_max = 0.0;  // MW
  double ramp_up = 0.0;
  double ramp_down = 0.0;
  double ramp_startup = 0.0;
  double ramp_shutdown = 0.0;
  bool initial_on = false;
  double initial_output = 0.0;

  bool operator==(const Generator&) const = default;
};

struct UCInstance {
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<Generator> generators;
  int horizon = 1;

  int nb() const { return static_cast<int>(buses.size()); }
  int nl() const { return static_cast<int>(lines.size()); }
  int ng() const { return static_cast<int>(generators.size()); }

  int reference_bus() const {
    for (const auto& b : buses)
      if (b.is_reference) return b.id;
    return -1;
  }

  double total_pmax() const {
    double s = 0.0;
    for (const auto& g : generators) s += g.p_max;
    return s;
  }

  bool operator==(const UCInstance&) const = default;
};

// nb x T matrix of nodal demands, MW.
struct LoadProfile {
  Matrix values;

  int nb() const { return static_cast<int>(values.rows()); }
  int horizon() const { return static_cast<int>(values.cols()); }

  double at(int bus, int t) const { return values(bus, t - 1); }  // t is 1-based
  double total(int t) const {
    double s = 0.0;
    for (int b = 0; b < nb(); ++b) s += at(b, t);
    return s;
  }

  bool operator==(const LoadProfile&) const = default;
};

namespace detail {

// Union-find connectivity over the line graph.
inline bool network_connected(const UCInstance& inst) {
  const int n = inst.nb();
  if (n == 0) return false;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& l : inst.lines) parent[find(l.from_bus)] = find(l.to_bus);
  int root = find(0);
  for (int b = 1; b < n; ++b)
    if (find(b) != root) return false;
  return true;
}

}  // namespace detail

// Checks every structural invariant of the instance; throws ValidationError
// (or DisconnectedNetworkError) naming the offending field.
inline void validate(const UCInstance& inst) {
  const int nb = inst.nb();
  if (nb == 0) throw ValidationError("buses: empty");
  int refs = 0;
  for (int i = 0; i < nb; ++i) {
    if (inst.buses[i].id != i)
      throw ValidationError("buses[" + std::to_string(i) +
                            "].id: ids must be 0..nb-1 contiguous");
    if (inst.buses[i].is_reference) ++refs;
  }
  if (refs != 1)
    throw ValidationError("buses: exactly one reference bus required, got " +
                          std::to_string(refs));
  for (std::size_t j = 0; j < inst.lines.size(); ++j) {
    const auto& l = inst.lines[j];
    const std::string p = "lines[" + std::to_string(j) + "]";
    if (l.from_bus < 0 || l.from_bus >= nb || l.to_bus < 0 || l.to_bus >= nb)
      throw ValidationError(p + ": bus id out of range");
    if (l.from_bus == l.to_bus)
      throw ValidationError(p + ": from_bus equals to_bus");
    if (!(l.susceptance > 0.0) || !std::isfinite(l.susceptance))
      throw ValidationError(p + ".susceptance: must be finite and > 0");
    if (!(l.flow_limit > 0.0) || !std::isfinite(l.flow_limit))
      throw ValidationError(p + ".flow_limit: must be finite and > 0");
  }
  if (inst.generators.empty())
    throw ValidationError("generators: at least one generator required");
  for (std::size_t i = 0; i < inst.generators.size(); ++i) {
    const auto& g = inst.generators[i];
    const std::string p = "generators[" + std::to_string(i) + "]";
    if (g.bus < 0 || g.bus >= nb) throw ValidationError(p + ".bus: out of range");
    if (!(0.0 <= g.p_min && g.p_min <= g.p_max))
      throw ValidationError(p + ": need 0 <= p_min <= p_max");
    if (g.ramp_up < 0 || g.ramp_down < 0 || g.ramp_startup < 0 ||
        g.ramp_shutdown < 0)
      throw ValidationError(p + ": ramp rates must be >= 0");
    if (!g.initial_on && g.initial_output != 0.0)
      throw ValidationError(p + ".initial_output: must be 0 when initial_on is false");
    if (g.initial_on &&
        !(g.p_min <= g.initial_output && g.initial_output <= g.p_max))
      throw ValidationError(p + ".initial_output: outside [p_min, p_max]");
  }
  if (inst.horizon < 1) throw ValidationError("horizon: must be >= 1");
  if (!detail::network_connected(inst))
    throw DisconnectedNetworkError("network is not connected");
}

// K maps fundamental flows (bus-angle coordinates at the nb-1 non-reference
// buses) to physical line flows; A maps them to nodal injections.
// A = full-incidence^T * diag(b) * reduced-incidence (weighted-Laplacian
// columns), K = diag(b) * reduced-incidence. Every column of A sums to zero
// and A has full column rank for a connected network.
struct FlowModel {
  Matrix K;  // nl x (nb-1)
  Matrix A;  // nb x (nb-1)
  int reference_bus = 0;
  std::vector<int> coord_of_bus;  // bus id -> column index, -1 for reference

  // Solves A f = p for a balanced injection vector p (length nb) using the
  // reduced square system with the reference row dropped.
  std::vector<double> flows_from_injection(const std::vector<double>& p) const {
    const std::size_t nf = A.cols();
    Matrix ared(nf, nf);
    std::vector<double> pred(nf);
    std::size_t r = 0;
    for (std::size_t b = 0; b < A.rows(); ++b) {
      if (static_cast<int>(b) == reference_bus) continue;
      for (std::size_t c = 0; c < nf; ++c) ared(r, c) = A(b, c);
      pred[r] = p[b];
      ++r;
    }
    std::vector<double> f = lu_solve(std::move(ared), std::move(pred));
    return K.multiply(f);
  }
};

inline FlowModel build_flow_model(const UCInstance& inst) {
  if (!detail::network_connected(inst))
    throw DisconnectedNetworkError("network is not connected");
  const int nb = inst.nb();
  const int nl = inst.nl();
  const int ref = inst.reference_bus();
  if (ref < 0) throw ValidationError("no reference bus declared");

  FlowModel fm;
  fm.reference_bus = ref;
  fm.coord_of_bus.assign(nb, -1);
  int c = 0;
  for (int b = 0; b < nb; ++b)
    if (b != ref) fm.coord_of_bus[b] = c++;
  const int nf = nb - 1;

  fm.K = Matrix(nl, nf);
  fm.A = Matrix(nb, nf);
  for (int j = 0; j < nl; ++j) {
    const auto& l = inst.lines[j];
    const double b = l.susceptance;
    const int cf = fm.coord_of_bus[l.from_bus];
    const int ct = fm.coord_of_bus[l.to_bus];
    if (cf >= 0) fm.K(j, cf) += b;
    if (ct >= 0) fm.K(j, ct) -= b;
  }
  // A = M_full^T * K where M_full is the full incidence matrix.
  for (int j = 0; j < nl; ++j) {
    const auto& l = inst.lines[j];
    for (int col = 0; col < nf; ++col) {
      const double k = fm.K(j, col);
      if (k == 0.0) continue;
      fm.A(l.from_bus, col) += k;
      fm.A(l.to_bus, col) -= k;
    }
  }

  // Rank check: the reduced system must be solvable.
  if (nf > 0) {
    Matrix ared(nf, nf);
    int r = 0;
    for (int b = 0; b < nb; ++b) {
      if (b == ref) continue;
      for (int col = 0; col < nf; ++col) ared(r, col) = fm.A(b, col);
      ++r;
    }
    lu_solve(std::move(ared), std::vector<double>(nf, 0.0));
  }
  return fm;
}

// Aggregates generator output to buses: row = bus, col = generator.
inline Matrix generator_bus_map(const UCInstance& inst) {
  Matrix g(inst.nb(), inst.ng());
  for (int i = 0; i < inst.ng(); ++i) g(inst.generators[i].bus, i) = 1.0;
  return g;
}

}  // namespace ucs
