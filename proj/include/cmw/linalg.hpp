#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace cmw {

/** Dense row-major matrix view helpers for the small systems used across the
 *  library (vertex enumeration, Newton steps). Not a general linear-algebra
 *  layer; the simplex keeps its own factorization-free basis inverse. */

/// Solves A x = b in place via partial-pivot LU. A is n*n row-major and is
/// destroyed. Returns false if A is numerically singular (pivot < tol).
inline bool lu_solve(std::vector<double>& A, std::vector<double>& b,
                     std::size_t n, double tol = 1e-11) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::fabs(A[perm[k] * n + k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = std::fabs(A[perm[i] * n + k]);
      if (v > best) { best = v; piv = i; }
    }
    if (best < tol) return false;
    std::swap(perm[k], perm[piv]);
    const double pivot = A[perm[k] * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = A[perm[i] * n + k] / pivot;
      if (f == 0.0) continue;
      A[perm[i] * n + k] = 0.0;
      for (std::size_t j = k + 1; j < n; ++j)
        A[perm[i] * n + j] -= f * A[perm[k] * n + j];
      b[perm[i]] -= f * b[perm[k]];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[perm[k]];
    for (std::size_t j = k + 1; j < n; ++j) s -= A[perm[k] * n + j] * x[j];
    x[k] = s / A[perm[k] * n + k];
  }
  b = std::move(x);
  return true;
}

/// Solves the symmetric positive definite system A x = b via Cholesky.
/// A is n*n row-major, destroyed. Returns false if not numerically SPD.
inline bool cholesky_solve(std::vector<double>& A, std::vector<double>& b,
                           std::size_t n, double tol = 1e-13) {
  for (std::size_t k = 0; k < n; ++k) {
    double d = A[k * n + k];
    for (std::size_t j = 0; j < k; ++j) d -= A[k * n + j] * A[k * n + j];
    if (d < tol) return false;
    const double Lkk = std::sqrt(d);
    A[k * n + k] = Lkk;
    for (std::size_t i = k + 1; i < n; ++i) {
      double s = A[i * n + k];
      for (std::size_t j = 0; j < k; ++j) s -= A[i * n + j] * A[k * n + j];
      A[i * n + k] = s / Lkk;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {          // forward: L y = b
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= A[i * n + j] * b[j];
    b[i] = s / A[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {            // backward: L' x = y
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A[j * n + i] * b[j];
    b[i] = s / A[i * n + i];
  }
  return true;
}

}  // namespace cmw
