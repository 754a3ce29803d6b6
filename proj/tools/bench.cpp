// Times the OpenMP kernels against their serial twins on a disk-domain
// plate matrix and reports the numeric gap between the two paths.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "plate/field.hpp"
#include "plate/geometry.hpp"
#include "plate/linalg.hpp"
#include "plate/par.hpp"
#include "plate/plate_operator.hpp"
#include "plate/reference.hpp"
#include "plate/rng.hpp"

using namespace plate;

namespace {

double time_ms(int reps, const std::function<void()>& body) {
  body();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) body();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, std::size_t n, double serial_ms,
            double parallel_ms, double gap) {
  std::printf("%-12s n=%-9zu serial %9.3f ms   parallel %9.3f ms   "
              "speedup %5.2fx   gap %.3g\n",
              name, n, serial_ms, parallel_ms,
              parallel_ms > 0.0 ? serial_ms / parallel_ms : 0.0, gap);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", par::thread_count());

  const DomainMask mask = make_disk(1.0, 1.0 / 128.0);
  const SparseMatrix A = assemble_plate(mask, 4.0);
  const std::size_t n = static_cast<std::size_t>(A.n);
  std::printf("disk h=1/128: %zu cells, %zu nonzeros\n\n", n, A.nnz());

  Rng rng(7);
  std::vector<double> x(n), y_ser(n), y_par(n);
  for (double& v : x) v = 2.0 * rng.uniform() - 1.0;

  // dot: chunked parallel reduction vs plain left-to-right sum
  double dot_ser = 0.0, dot_par = 0.0;
  const double t_dot_ser = time_ms(200, [&] { dot_ser = reference::dot(x, x); });
  const double t_dot_par = time_ms(200, [&] { dot_par = par::dot(x, x); });
  report("dot", n, t_dot_ser, t_dot_par,
         std::abs(dot_ser - dot_par) / std::abs(dot_ser));

  // spmv: per-row accumulation is sequential in both paths, so the outputs
  // must agree to the last bit
  const double t_spmv_ser = time_ms(50, [&] {
    reference::spmv(A.row_ptr, A.col, A.val, x, y_ser);
  });
  const double t_spmv_par = time_ms(50, [&] { spmv(A, x, y_par); });
  double spmv_gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    spmv_gap = std::max(spmv_gap, std::abs(y_ser[i] - y_par[i]));
  }
  report("spmv", n, t_spmv_ser, t_spmv_par, spmv_gap);

  // level statistics: superlevel integral of a smooth field over a ball
  const ScalarField u = make_calibration_field(mask, 42);
  const Ball ball{{0.0, 0.0, 0.0}, 0.8};
  const std::vector<int> cells = ball_cells(mask, ball);
  const double w = std::pow(mask.h, mask.dim);
  const double k = 0.5 * (min_value(u) + max_value(u));

  double lvl_ser = 0.0, lvl_par = 0.0;
  const double t_lvl_ser = time_ms(200, [&] {
    double s = 0.0;
    for (const int c : cells) {
      const double d = u.values[c] - k;
      if (d > 0.0) s += d * d * w;
    }
    lvl_ser = s;
  });
  const double t_lvl_par = time_ms(200, [&] {
    lvl_par = par::sum_indexed(cells.size(), [&](std::size_t i) {
      const double d = u.values[cells[i]] - k;
      return d > 0.0 ? d * d * w : 0.0;
    });
  });
  report("level", cells.size(), t_lvl_ser, t_lvl_par,
         std::abs(lvl_ser - lvl_par) / std::abs(lvl_ser));

  // end-to-end solve, parallel path only
  const ScalarField f = make_field(mask, [](const Point&) { return 64.0; });
  PlateSolution sol;
  const double t_solve = time_ms(1, [&] {
    sol = solve_plate(mask, f, 4.0, 1e-8, false);
  });
  std::printf("\nsolve        n=%-9zu %9.3f ms   iterations %d   converged %d\n",
              n, t_solve, sol.stats.iterations, sol.stats.converged ? 1 : 0);
  return 0;
}
