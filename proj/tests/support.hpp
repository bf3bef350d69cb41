#pragma once

// Shared test utilities: an independent vertex-enumeration LP oracle,
// random problem generators, and small file helpers for the CLI tests.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ucs/dense.hpp"
#include "ucs/lp.hpp"
#include "ucs/rng.hpp"

namespace testsup {

struct VertexOracleResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> argmax;
};

// Independent LP oracle: enumerates every choice of n active hyperplanes
// (row bounds and variable bounds), solves the square system, keeps feasible
// vertices and returns the best. Requires finite variable bounds so the LP
// can never be unbounded. Deliberately brute-force; shares no code with the
// simplex under test.
inline VertexOracleResult vertex_oracle(const ucs::LinearProgram& lp,
                                        double feas_tol = 1e-7) {
  const int n = lp.num_vars();
  struct Plane {
    std::vector<double> a;
    double rhs;
  };
  std::vector<Plane> planes;
  for (int i = 0; i < lp.num_rows(); ++i) {
    std::vector<double> a(n, 0.0);
    for (const auto& [j, v] : lp.rows[i]) a[j] += v;
    if (std::isfinite(lp.row_lower[i])) planes.push_back({a, lp.row_lower[i]});
    if (std::isfinite(lp.row_upper[i]) && lp.row_upper[i] != lp.row_lower[i])
      planes.push_back({a, lp.row_upper[i]});
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double> a(n, 0.0);
    a[j] = 1.0;
    planes.push_back({a, lp.var_lower[j]});
    if (lp.var_upper[j] != lp.var_lower[j]) planes.push_back({a, lp.var_upper[j]});
  }

  const int p = static_cast<int>(planes.size());
  VertexOracleResult best;
  const double sign = lp.objective_sense == ucs::Sense::MAX ? 1.0 : -1.0;
  std::vector<int> pick(n);

  auto feasible_point = [&](const std::vector<double>& x) {
    for (int j = 0; j < n; ++j)
      if (x[j] < lp.var_lower[j] - feas_tol || x[j] > lp.var_upper[j] + feas_tol)
        return false;
    for (int i = 0; i < lp.num_rows(); ++i) {
      double act = 0.0;
      for (const auto& [j, v] : lp.rows[i]) act += v * x[j];
      if (act < lp.row_lower[i] - feas_tol || act > lp.row_upper[i] + feas_tol)
        return false;
    }
    return true;
  };

  auto consider = [&](const std::vector<int>& idx) {
    ucs::Matrix a(n, n);
    std::vector<double> b(n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) a(r, c) = planes[idx[r]].a[c];
      b[r] = planes[idx[r]].rhs;
    }
    std::vector<double> x;
    try {
      x = ucs::lu_solve(std::move(a), std::move(b), 1e-9);
    } catch (const ucs::SingularNetworkError&) {
      return;
    }
    if (!feasible_point(x)) return;
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += lp.objective[j] * x[j];
    if (!best.feasible || sign * obj > sign * best.objective + 0.0) {
      best.feasible = true;
      best.objective = obj;
      best.argmax = x;
    }
  };

  // Enumerate combinations of n planes out of p.
  std::vector<int> idx(n);
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      consider(idx);
      return;
    }
    for (int i = start; i <= p - (n - depth); ++i) {
      idx[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  if (n <= p) rec(rec, 0, 0);
  return best;
}

// Random LP with finite variable bounds (never unbounded).
inline ucs::LinearProgram random_lp(ucs::Rng& rng, int max_vars = 6,
                                    int max_rows = 4) {
  ucs::LinearProgram lp;
  const int n = rng.uniform_int(2, max_vars);
  const int m = rng.uniform_int(1, max_rows);
  lp.objective_sense = rng.uniform01() < 0.5 ? ucs::Sense::MIN : ucs::Sense::MAX;
  for (int j = 0; j < n; ++j) {
    const double lo = rng.uniform(-10.0, 5.0);
    lp.add_var(lo, lo + rng.uniform(0.0, 15.0), rng.uniform(-5.0, 5.0));
  }
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> row;
    for (int j = 0; j < n; ++j)
      if (rng.uniform01() < 0.7) row.emplace_back(j, rng.uniform(-3.0, 3.0));
    if (row.empty()) row.emplace_back(rng.uniform_int(0, n - 1), 1.0);
    const double c = rng.uniform(-10.0, 10.0);
    const int kind = rng.uniform_int(0, 2);
    if (kind == 0)
      lp.add_row(-ucs::kInf, c, std::move(row));
    else if (kind == 1)
      lp.add_row(c, ucs::kInf, std::move(row));
    else
      lp.add_row(c, c + rng.uniform(0.0, 8.0), std::move(row));
  }
  return lp;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace testsup
