#pragma once

/// @file linalg.hpp
/// @brief CSR sparse matrix and a Jacobi-preconditioned conjugate gradient.

#include <cstddef>
#include <span>
#include <vector>

namespace plate {

struct SparseMatrix {
  int n = 0;
  std::vector<int> row_ptr;  // size n + 1
  std::vector<int> col;      // ascending within each row
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }
  /// Exact structural and numerical symmetry.
  bool is_symmetric() const;
};

/// y = A x, rows in parallel, per-row accumulation sequential so the result
/// does not depend on the thread count.
void spmv(const SparseMatrix& A, std::span<const double> x,
          std::span<double> y);

struct SolveStats {
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;  // true residual |b - Ax| / |b|, recomputed
  double rhs_norm = 0.0;
};

/// Jacobi-preconditioned CG for symmetric positive definite A.
///
/// Zero right-hand side returns the zero vector as converged. Convergence
/// is declared on the true residual, recomputed in extended precision when
/// the recurrence residual reaches the target; if rounding has detached the
/// recurrence from the truth the solve restarts from the current iterate on
/// the recomputed residual. Non-convergence returns the best iterate with
/// converged = false; it is the caller's job to decide whether that is fatal.
SolveStats solve_spd(const SparseMatrix& A, std::span<const double> b,
                     std::span<double> x, double tol = 1e-10,
                     long long max_iter = -1);

}  // namespace plate
