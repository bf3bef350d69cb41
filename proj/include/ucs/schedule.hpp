#pragma once

#include <vector>

#include "ucs/dense.hpp"

namespace ucs {

enum class Provenance { SOLVED, PREDICTED, PARTIAL };

// Binary generator on/off matrix over the horizon (ng x T).
struct CommitmentSchedule {
  Matrix u;  // entries 0/1
  Provenance provenance = Provenance::SOLVED;

  int ng() const { return static_cast<int>(u.rows()); }
  int horizon() const { return static_cast<int>(u.cols()); }
  bool on(int gen, int t) const { return u(gen, t - 1) > 0.5; }  // t is 1-based

  bool operator==(const CommitmentSchedule&) const = default;
};

// A schedule defined only on a subset of timesteps (T_pre).
struct PartialSchedule {
  CommitmentSchedule schedule;      // values meaningful only on steps
  std::vector<int> steps;           // sorted, 1-based

  bool covers(int t) const {
    for (int s : steps)
      if (s == t) return true;
    return false;
  }
};

}  // namespace ucs
