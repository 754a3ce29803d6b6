#include "plate/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "plate/par.hpp"

namespace plate {

bool SparseMatrix::is_symmetric() const {
  std::map<std::pair<int, int>, double> upper;
  for (int r = 0; r < n; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col[k] > r) upper[{r, col[k]}] = val[k];
    }
  for (int r = 0; r < n; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      if (col[k] >= r) continue;
      auto it = upper.find({col[k], r});
      if (it == upper.end() || it->second != val[k]) return false;
      upper.erase(it);
    }
  return upper.empty();
}

void spmv(const SparseMatrix& A, std::span<const double> x,
          std::span<double> y) {
  par::parallel_for(static_cast<std::size_t>(A.n), [&](std::size_t r) {
    double s = 0.0;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
      s += A.val[k] * x[A.col[k]];
    y[r] = s;
  });
}

namespace {

/// b - A x accumulated in long double; the refinement anchor.
void true_residual(const SparseMatrix& A, std::span<const double> b,
                   std::span<const double> x, std::span<double> r) {
  par::parallel_for(static_cast<std::size_t>(A.n), [&](std::size_t row) {
    long double s = static_cast<long double>(b[row]);
    for (int k = A.row_ptr[row]; k < A.row_ptr[row + 1]; ++k)
      s -= static_cast<long double>(A.val[k]) * x[A.col[k]];
    r[row] = static_cast<double>(s);
  });
}

double nrm2(std::span<const double> v) { return std::sqrt(par::dot(v, v)); }

}  // namespace

SolveStats solve_spd(const SparseMatrix& A, std::span<const double> b,
                     std::span<double> x, double tol, long long max_iter) {
  const std::size_t n = static_cast<std::size_t>(A.n);
  if (b.size() != n || x.size() != n)
    throw std::invalid_argument("solve_spd: size mismatch");
  if (max_iter < 0) max_iter = 50LL * static_cast<long long>(n);

  SolveStats stats;
  stats.rhs_norm = nrm2(b);
  std::fill(x.begin(), x.end(), 0.0);
  if (stats.rhs_norm == 0.0) {
    stats.converged = true;
    return stats;
  }
  const double target = tol * stats.rhs_norm;

  std::vector<double> inv_diag(n);
  for (std::size_t r = 0; r < n; ++r) {
    double d = 0.0;
    for (int k = A.row_ptr[r]; k < A.row_ptr[r + 1]; ++k)
      if (A.col[k] == static_cast<int>(r)) d = A.val[k];
    if (!(d > 0.0)) throw std::invalid_argument("solve_spd: non-positive diagonal");
    inv_diag[r] = 1.0 / d;
  }

  std::vector<double> r(n), z(n), p(n), Ap(n);
  long long iters = 0;
  const int max_restarts = 6;

  for (int restart = 0; restart <= max_restarts; ++restart) {
    true_residual(A, b, x, r);
    double true_norm = nrm2(r);
    if (true_norm <= target) {
      stats.converged = true;
      stats.final_residual = true_norm / stats.rhs_norm;
      stats.iterations = static_cast<int>(iters);
      return stats;
    }
    if (iters >= max_iter) break;

    par::parallel_for(n, [&](std::size_t i) { z[i] = inv_diag[i] * r[i]; });
    p = z;
    double rz = par::dot(r, z);

    while (iters < max_iter) {
      spmv(A, p, Ap);
      const double pAp = par::dot(p, Ap);
      if (!(pAp > 0.0)) break;  // lost positivity to rounding; recompute
      const double alpha = rz / pAp;
      par::parallel_for(n, [&](std::size_t i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
      });
      ++iters;
      const double rn = nrm2(r);
      if (rn <= 0.5 * target) break;  // recurrence target, verify on restart
      par::parallel_for(n, [&](std::size_t i) { z[i] = inv_diag[i] * r[i]; });
      const double rz_next = par::dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      par::parallel_for(n, [&](std::size_t i) { p[i] = z[i] + beta * p[i]; });
    }
  }

  std::vector<double> rt(n);
  true_residual(A, b, x, rt);
  stats.final_residual = nrm2(rt) / stats.rhs_norm;
  stats.converged = stats.final_residual <= tol;
  stats.iterations = static_cast<int>(iters);
  return stats;
}

}  // namespace plate
