#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include "ucs/errors.hpp"

namespace ucs {

// Small row-major dense matrix. Used for flow-model construction and the
// handful of linear solves the model layer needs; the simplex keeps its own
// tableau storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  bool operator==(const Matrix& o) const = default;

  std::vector<double> multiply(const std::vector<double>& v) const {
    assert(v.size() == cols_);
    std::vector<double> out(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      const double* row = &data_[r * cols_];
      for (std::size_t c = 0; c < cols_; ++c) s += row[c] * v[c];
      out[r] = s;
    }
    return out;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// Solves a square system in place with partial pivoting. Throws
// SingularNetworkError when the matrix is numerically rank deficient.
inline std::vector<double> lu_solve(Matrix a, std::vector<double> b,
                                    double pivot_tol = 1e-11) {
  const std::size_t n = a.rows();
  assert(a.cols() == n && b.size() == n);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::fabs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      double v = std::fabs(a(r, col));
      if (v > best) { best = v; piv = r; }
    }
    if (best < pivot_tol)
      throw SingularNetworkError("rank-deficient system in lu_solve");
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(col, c), a(piv, c));
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= a(ri, c) * x[c];
    x[ri] = s / a(ri, ri);
  }
  return x;
}

}  // namespace ucs
