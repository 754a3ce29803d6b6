// Clamped-plate assembly and solves against symbolic oracles: stencil
// coefficients from composing five-point Laplacians, manufactured solutions
// on the disk and on grid-aligned rectangles, energy identities, and the
// gamma-independence of the gradient bound.

#include <doctest.h>

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "plate/field.hpp"
#include "plate/geometry.hpp"
#include "plate/linalg.hpp"
#include "plate/plate_operator.hpp"
#include "plate/rng.hpp"

using namespace plate;

namespace {

// u = (x(1-x) y(1-y))^2 vanishes with its normal derivative on the unit
// square boundary; f follows symbolically from f = lap^2 u - gamma lap u
double rect_u(const Point& p) {
  const double gx = p[0] * p[0] * (1.0 - p[0]) * (1.0 - p[0]);
  const double gy = p[1] * p[1] * (1.0 - p[1]) * (1.0 - p[1]);
  return gx * gy;
}

double rect_f(const Point& p, double gamma) {
  const double x = p[0], y = p[1];
  const double gx = x * x * (1.0 - x) * (1.0 - x);
  const double gy = y * y * (1.0 - y) * (1.0 - y);
  const double gx2 = 2.0 - 12.0 * x + 12.0 * x * x;
  const double gy2 = 2.0 - 12.0 * y + 12.0 * y * y;
  const double lap2 = 24.0 * gy + 2.0 * gx2 * gy2 + 24.0 * gx;
  const double lap = gx2 * gy + gx * gy2;
  return lap2 - gamma * lap;
}

double max_error_against(const ScalarField& u,
                         const std::function<double(const Point&)>& exact) {
  double err = 0.0;
  for (std::size_t c = 0; c < u.mask->interior_count(); ++c) {
    const Point p = u.mask->node_point(u.mask->cells[c]);
    err = std::max(err, std::abs(u.values[c] - exact(p)));
  }
  return err;
}

double rect_solve_error(double h, double gamma) {
  const DomainMask mask = make_rectangle({1.0, 1.0, 0.0}, h);
  const ScalarField f =
      make_field(mask, [gamma](const Point& p) { return rect_f(p, gamma); });
  const PlateSolution sol = solve_plate(mask, f, gamma, 1e-11);
  return max_error_against(sol.u, rect_u);
}

std::map<std::pair<int, int>, double> row_by_offset(const DomainMask& mask,
                                                    const SparseMatrix& a,
                                                    int i, int j) {
  const int row = mask.compact_id[mask.node_id(i, j, 0)];
  REQUIRE(row >= 0);
  std::map<std::pair<int, int>, double> out;
  for (int k = a.row_ptr[row]; k < a.row_ptr[row + 1]; ++k) {
    const auto c = mask.node_coords(mask.cells[a.col[k]]);
    out[{c[0] - i, c[1] - j}] = a.val[k];
  }
  return out;
}

}  // namespace

TEST_CASE("far-interior stencil rows match the composed symbolic stencils") {
  const DomainMask mask = make_rectangle({1.0, 1.0, 0.0}, 1.0 / 16.0);
  const double h2 = mask.h * mask.h, h4 = h2 * h2;
  const int mid = 8;

  const auto lap = row_by_offset(mask, assemble_laplacian(mask), mid, mid);
  CHECK(lap.at({0, 0}) == doctest::Approx(4.0 / h2));
  CHECK(lap.at({1, 0}) == doctest::Approx(-1.0 / h2));
  CHECK(lap.at({0, -1}) == doctest::Approx(-1.0 / h2));

  const auto bi = row_by_offset(mask, assemble_biharmonic(mask), mid, mid);
  CHECK(bi.at({0, 0}) == doctest::Approx(20.0 / h4));
  CHECK(bi.at({1, 0}) == doctest::Approx(-8.0 / h4));
  CHECK(bi.at({1, 1}) == doctest::Approx(2.0 / h4));
  CHECK(bi.at({2, 0}) == doctest::Approx(1.0 / h4));

  SUBCASE("rows annihilate constants away from the boundary") {
    double lsum = 0.0, bsum = 0.0;
    for (const auto& [off, v] : lap) lsum += v;
    for (const auto& [off, v] : bi) bsum += v;
    CHECK(std::abs(lsum) < 1e-9 / h2);
    CHECK(std::abs(bsum) < 1e-9 / h4);
  }
}

TEST_CASE("assembled plate matrix is exactly symmetric and positive definite") {
  const DomainMask mask = make_disk(1.0, 1.0 / 8.0);
  const SparseMatrix a = assemble_plate(mask, 3.0);
  CHECK(a.is_symmetric());

  Rng rng(17);
  const int n = a.n;
  std::vector<double> x(n), y(n), ax(n), ay(n);
  for (int trial = 0; trial < 100; ++trial) {
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    for (double& v : y) v = rng.uniform(-1.0, 1.0);
    spmv(a, x, ax);
    spmv(a, y, ay);
    double xay = 0.0, yax = 0.0, xax = 0.0, scale = 0.0;
    for (int i = 0; i < n; ++i) {
      xay += x[i] * ay[i];
      yax += y[i] * ax[i];
      xax += x[i] * ax[i];
      scale += std::abs(x[i] * ax[i]);
    }
    CHECK(std::abs(xay - yax) <= 1e-12 * (scale + 1.0));
    CHECK(xax > 0.0);
  }
}

TEST_CASE("zero source solves to the zero field") {
  const DomainMask mask = make_disk(1.0, 1.0 / 8.0);
  const ScalarField f = make_field(mask, [](const Point&) { return 0.0; });
  const PlateSolution sol = solve_plate(mask, f, 1.0);
  CHECK(sol.stats.converged);
  for (double v : sol.u.values) CHECK(v == 0.0);
}

TEST_CASE("manufactured rectangle solution converges at second order") {
  for (const double gamma : {0.0, 4.0}) {
    CAPTURE(gamma);
    const double e16 = rect_solve_error(1.0 / 16.0, gamma);
    const double e32 = rect_solve_error(1.0 / 32.0, gamma);
    const double ratio = e16 / e32;
    CHECK(ratio >= 3.2);
    CHECK(ratio <= 4.8);
  }
}

TEST_CASE("manufactured disk solution at both gammas") {
  const DomainMask mask = make_disk(1.0, 1.0 / 32.0);
  for (const double gamma : {0.0, 4.0}) {
    CAPTURE(gamma);
    const ScalarField f = make_field(mask, [gamma](const Point& p) {
      const double r2 = p[0] * p[0] + p[1] * p[1];
      return 64.0 + gamma * (8.0 - 16.0 * r2);
    });
    const PlateSolution sol = solve_plate(mask, f, gamma);
    REQUIRE(sol.stats.converged);

    // masked-boundary error is first order; the interior stays below 4e-2
    // at this resolution for both gammas
    double err = 0.0;
    for (std::size_t c = 0; c < mask.interior_count(); ++c) {
      if (mask.cell_dist[c] <= 4.0 * mask.h) continue;
      const Point p = mask.node_point(mask.cells[c]);
      const double r2 = p[0] * p[0] + p[1] * p[1];
      const double exact = (1.0 - r2) * (1.0 - r2);
      err = std::max(err, std::abs(sol.u.values[c] - exact));
    }
    CHECK(err < 0.04);
    CHECK(err > 0.0);

    const EnergyReport energy = energy_report(mask, sol.u, f, gamma);
    CHECK(energy.bend >= 0.0);
    CHECK(energy.stretch >= 0.0);
    CHECK(energy.identity_residual <= 1e-6);
  }
}

TEST_CASE("energy identity and the positive-work consequence") {
  const DomainMask mask = make_disk(1.0, 1.0 / 16.0);
  const ScalarField f = make_field(mask, [](const Point&) { return 1.0; });

  SUBCASE("zero fields give a zero report") {
    const ScalarField z = make_field(mask, [](const Point&) { return 0.0; });
    const EnergyReport energy = energy_report(mask, z, z, 2.0);
    CHECK(energy.bend == 0.0);
    CHECK(energy.stretch == 0.0);
    CHECK(energy.work == 0.0);
  }

  SUBCASE("nonnegative source forces positive work and a positive maximum") {
    const PlateSolution sol = solve_plate(mask, f, 2.0);
    const EnergyReport energy = energy_report(mask, sol.u, f, 2.0);
    CHECK(energy.work > 0.0);
    CHECK(max_value(sol.u) > 0.0);
    CHECK(energy.identity_residual <= 100.0 * 1e-10);
  }

  SUBCASE("energy is nonincreasing in gamma") {
    double prev = std::numeric_limits<double>::infinity();
    for (const double gamma : {0.0, 1.0, 2.0, 4.0, 8.0}) {
      const PlateSolution sol = solve_plate(mask, f, gamma);
      const EnergyReport energy = energy_report(mask, sol.u, f, gamma);
      CHECK(energy.work <= prev);
      prev = energy.work;
    }
  }
}

TEST_CASE("gradient norms") {
  const DomainMask mask = make_rectangle({1.0, 1.0, 0.0}, 1.0 / 32.0);

  SUBCASE("zero field has zero norm") {
    const ScalarField z = make_field(mask, [](const Point&) { return 0.0; });
    CHECK(gradient_lt_norm(z, 2.0) == 0.0);
  }

  SUBCASE("linear ramp matches the analytic L2 norm") {
    // |grad| = 3 on the open square, area 1; the one-sided boundary layer
    // contributes a relative error of one part in 1/h
    const DomainMask fine = make_rectangle({1.0, 1.0, 0.0}, 1.0 / 64.0);
    const ScalarField ramp =
        make_field(fine, [](const Point& p) { return 3.0 * p[0]; });
    CHECK(std::abs(gradient_lt_norm(ramp, 2.0) - 3.0) / 3.0 < 0.02);
  }
}

TEST_CASE("gradient bound constant does not grow with gamma") {
  const DomainMask mask = make_disk(1.0, 1.0 / 16.0);
  const ScalarField f = make_field(mask, [](const Point&) { return 1.0; });

  double at_zero = 0.0;
  double worst = 0.0;
  for (const double gamma : {0.0, 1.0, 10.0, 100.0}) {
    const PlateSolution sol = solve_plate(mask, f, gamma);
    REQUIRE(sol.stats.converged);
    const GradientBoundReport rep = check_gradient_bound(mask, sol.u, f, 6.0);
    CHECK(rep.lhs >= 0.0);
    if (gamma == 0.0) at_zero = rep.implied_sqrt;
    worst = std::max(worst, rep.implied_sqrt);
  }
  CHECK(at_zero > 0.0);
  CHECK(worst <= 1.1 * at_zero);
}

TEST_CASE("three dimensional assembly sanity") {
  const DomainMask mask = make_rectangle({1.0, 1.0, 1.0}, 1.0 / 8.0, 3);
  const double h2 = mask.h * mask.h, h4 = h2 * h2;

  const SparseMatrix lap = assemble_laplacian(mask);
  const SparseMatrix bi = assemble_biharmonic(mask);
  CHECK(lap.is_symmetric());
  CHECK(bi.is_symmetric());

  const int row = mask.compact_id[mask.node_id(4, 4, 4)];
  REQUIRE(row >= 0);
  for (int k = lap.row_ptr[row]; k < lap.row_ptr[row + 1]; ++k) {
    if (lap.col[k] == row) CHECK(lap.val[k] == doctest::Approx(6.0 / h2));
  }
  for (int k = bi.row_ptr[row]; k < bi.row_ptr[row + 1]; ++k) {
    if (bi.col[k] == row) CHECK(bi.val[k] == doctest::Approx(42.0 / h4));
  }

  const ScalarField f = make_field(mask, [](const Point&) { return 1.0; });
  const PlateSolution sol = solve_plate(mask, f, 1.0);
  REQUIRE(sol.stats.converged);
  const EnergyReport energy = energy_report(mask, sol.u, f, 1.0);
  CHECK(energy.identity_residual <= 1e-6);
  CHECK(max_value(sol.u) > 0.0);
}

TEST_CASE("too-coarse biharmonic grids are rejected") {
  const DomainMask mask = make_rectangle({1.0, 1.0, 0.0}, 0.25);
  CHECK_THROWS_WITH_AS(assemble_biharmonic(mask),
                       "grid too coarse for biharmonic stencil",
                       std::invalid_argument);
}
