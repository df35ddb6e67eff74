#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qsflat/dual.hpp"
#include "qsflat/errors.hpp"

namespace qsflat {

/// Solve A x = b in place for a small dense system, Gaussian elimination
/// with partial pivoting on value magnitude. Works for dual scalars.
/// A is row-major dim x dim; b holds dim entries and receives x.
template <class T>
void solve_dense_inplace(std::vector<T>& A, std::vector<T>& b, int dim,
                         double pivot_tol = 1e-12) {
  for (int col = 0; col < dim; ++col) {
    int piv = col;
    double best = std::abs(value_of(A[static_cast<std::size_t>(col * dim + col)]));
    for (int r = col + 1; r < dim; ++r) {
      double cand = std::abs(value_of(A[static_cast<std::size_t>(r * dim + col)]));
      if (cand > best) { best = cand; piv = r; }
    }
    if (best < pivot_tol)
      throw SingularityError("dense solve: pivot " + std::to_string(best) +
                             " below tolerance (singular system)");
    if (piv != col) {
      for (int c = 0; c < dim; ++c)
        std::swap(A[static_cast<std::size_t>(piv * dim + c)], A[static_cast<std::size_t>(col * dim + c)]);
      std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
    }
    for (int r = col + 1; r < dim; ++r) {
      T factor = A[static_cast<std::size_t>(r * dim + col)] / A[static_cast<std::size_t>(col * dim + col)];
      for (int c = col; c < dim; ++c)
        A[static_cast<std::size_t>(r * dim + c)] =
            A[static_cast<std::size_t>(r * dim + c)] - factor * A[static_cast<std::size_t>(col * dim + c)];
      b[static_cast<std::size_t>(r)] = b[static_cast<std::size_t>(r)] - factor * b[static_cast<std::size_t>(col)];
    }
  }
  for (int r = dim - 1; r >= 0; --r) {
    T acc = b[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < dim; ++c)
      acc = acc - A[static_cast<std::size_t>(r * dim + c)] * b[static_cast<std::size_t>(c)];
    b[static_cast<std::size_t>(r)] = acc / A[static_cast<std::size_t>(r * dim + r)];
  }
}

/// Least-squares solve of the overdetermined system B u = rhs
/// (B: rows x cols, row-major, rows >= cols) via normal equations.
/// Returns u; rhs and B are not modified.
template <class T>
std::vector<T> least_squares(const std::vector<T>& B, const std::vector<T>& rhs,
                             int rows, int cols, double pivot_tol = 1e-12) {
  std::vector<T> N(static_cast<std::size_t>(cols * cols));
  std::vector<T> g(static_cast<std::size_t>(cols));
  for (int i = 0; i < cols; ++i) {
    for (int j = 0; j < cols; ++j) {
      T acc{};
      for (int r = 0; r < rows; ++r)
        acc += B[static_cast<std::size_t>(r * cols + i)] * B[static_cast<std::size_t>(r * cols + j)];
      N[static_cast<std::size_t>(i * cols + j)] = acc;
    }
    T acc{};
    for (int r = 0; r < rows; ++r)
      acc += B[static_cast<std::size_t>(r * cols + i)] * rhs[static_cast<std::size_t>(r)];
    g[static_cast<std::size_t>(i)] = acc;
  }
  solve_dense_inplace(N, g, cols, pivot_tol);
  return g;
}

}  // namespace qsflat
