#include "plate/plate_operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plate/par.hpp"

namespace plate {

namespace {

constexpr std::array<std::array<int, 3>, 3> kAxes{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

struct RowAccum {
  // (compact id, coefficient) pairs, combined and sorted at the end
  std::vector<std::pair<int, double>> terms;

  void add(int c, double v) { terms.push_back({c, v}); }

  void finalize(std::vector<int>& cols, std::vector<double>& vals) {
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    cols.clear();
    vals.clear();
    for (const auto& [c, v] : terms) {
      if (!cols.empty() && cols.back() == c)
        vals.back() += v;
      else {
        cols.push_back(c);
        vals.push_back(v);
      }
    }
  }
};

void check_interior_span(const DomainMask& m) {
  std::array<int, 3> lo{1 << 30, 1 << 30, 1 << 30}, hi{-1, -1, -1};
  for (int id : m.cells) {
    const auto c = m.node_coords(id);
    for (int ax = 0; ax < m.dim; ++ax) {
      lo[ax] = std::min(lo[ax], c[ax]);
      hi[ax] = std::max(hi[ax], c[ax]);
    }
  }
  for (int ax = 0; ax < m.dim; ++ax)
    if (hi[ax] - lo[ax] + 1 < 5)
      throw std::invalid_argument("grid too coarse for biharmonic stencil");
}

SparseMatrix from_rows(const DomainMask& m,
                       std::vector<std::vector<int>>& cols,
                       std::vector<std::vector<double>>& vals) {
  SparseMatrix A;
  A.n = static_cast<int>(m.interior_count());
  A.row_ptr.resize(A.n + 1, 0);
  for (int r = 0; r < A.n; ++r)
    A.row_ptr[r + 1] = A.row_ptr[r] + static_cast<int>(cols[r].size());
  A.col.resize(A.row_ptr[A.n]);
  A.val.resize(A.row_ptr[A.n]);
  par::parallel_for(static_cast<std::size_t>(A.n), [&](std::size_t r) {
    std::copy(cols[r].begin(), cols[r].end(), A.col.begin() + A.row_ptr[r]);
    std::copy(vals[r].begin(), vals[r].end(), A.val.begin() + A.row_ptr[r]);
  });
  return A;
}

}  // namespace

SparseMatrix assemble_laplacian(const DomainMask& m) {
  const double ih2 = 1.0 / (m.h * m.h);
  const int nn = 2 * m.dim;
  std::vector<std::vector<int>> cols(m.interior_count());
  std::vector<std::vector<double>> vals(m.interior_count());

  par::parallel_for(m.interior_count(), [&](std::size_t cx) {
    const auto [i, j, k] = m.node_coords(m.cells[cx]);
    RowAccum row;
    row.add(static_cast<int>(cx), nn * ih2);
    for (int ax = 0; ax < m.dim; ++ax)
      for (int sgn : {-1, 1}) {
        const int ni = i + sgn * kAxes[ax][0], nj = j + sgn * kAxes[ax][1],
                  nk = k + sgn * kAxes[ax][2];
        if (m.is_interior(ni, nj, nk))
          row.add(m.compact_id[m.node_id(ni, nj, nk)], -ih2);
      }
    row.finalize(cols[cx], vals[cx]);
  });
  return from_rows(m, cols, vals);
}

SparseMatrix assemble_biharmonic(const DomainMask& m) {
  check_interior_span(m);
  const double ih2 = 1.0 / (m.h * m.h);
  const int nn = 2 * m.dim;

  // Coefficients of the intermediate field w = L u at node z as a linear
  // combination of interior values. Interior z: the plain stencil with zero
  // extension. Non-interior z: reflection, u(ghost) = u(mirror), doubling
  // the interior side of each axis that crosses the boundary at z.
  auto stamp_w = [&](int zi, int zj, int zk, double weight, RowAccum& row) {
    if (m.is_interior(zi, zj, zk)) {
      row.add(m.compact_id[m.node_id(zi, zj, zk)], weight * nn * ih2);
      for (int ax = 0; ax < m.dim; ++ax)
        for (int sgn : {-1, 1}) {
          const int ni = zi + sgn * kAxes[ax][0], nj = zj + sgn * kAxes[ax][1],
                    nk = zk + sgn * kAxes[ax][2];
          if (m.is_interior(ni, nj, nk))
            row.add(m.compact_id[m.node_id(ni, nj, nk)], -weight * ih2);
        }
      return;
    }
    for (int ax = 0; ax < m.dim; ++ax) {
      const int pi = zi + kAxes[ax][0], pj = zj + kAxes[ax][1],
                pk = zk + kAxes[ax][2];
      const int mi = zi - kAxes[ax][0], mj = zj - kAxes[ax][1],
                mk = zk - kAxes[ax][2];
      const bool plus = m.is_interior(pi, pj, pk);
      const bool minus = m.is_interior(mi, mj, mk);
      if (plus && minus) {
        row.add(m.compact_id[m.node_id(pi, pj, pk)], -weight * ih2);
        row.add(m.compact_id[m.node_id(mi, mj, mk)], -weight * ih2);
      } else if (plus) {
        row.add(m.compact_id[m.node_id(pi, pj, pk)], -2.0 * weight * ih2);
      } else if (minus) {
        row.add(m.compact_id[m.node_id(mi, mj, mk)], -2.0 * weight * ih2);
      }
    }
  };

  std::vector<std::vector<int>> cols(m.interior_count());
  std::vector<std::vector<double>> vals(m.interior_count());
  par::parallel_for(m.interior_count(), [&](std::size_t cx) {
    const auto [i, j, k] = m.node_coords(m.cells[cx]);
    RowAccum row;
    stamp_w(i, j, k, nn * ih2, row);
    for (int ax = 0; ax < m.dim; ++ax)
      for (int sgn : {-1, 1})
        stamp_w(i + sgn * kAxes[ax][0], j + sgn * kAxes[ax][1],
                k + sgn * kAxes[ax][2], -ih2, row);
    row.finalize(cols[cx], vals[cx]);
  });

  SparseMatrix B = from_rows(m, cols, vals);
  if (!B.is_symmetric())
    throw std::runtime_error("biharmonic assembly lost symmetry; mask has a one-node feature");
  return B;
}

SparseMatrix assemble_plate(const DomainMask& m, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be nonnegative");
  SparseMatrix A = assemble_biharmonic(m);
  if (gamma == 0.0) return A;
  const SparseMatrix L = assemble_laplacian(m);
  // L's pattern is a subset of A's
  par::parallel_for(static_cast<std::size_t>(A.n), [&](std::size_t r) {
    for (int lk = L.row_ptr[r]; lk < L.row_ptr[r + 1]; ++lk) {
      const int c = L.col[lk];
      for (int ak = A.row_ptr[r]; ak < A.row_ptr[r + 1]; ++ak)
        if (A.col[ak] == c) {
          A.val[ak] += gamma * L.val[lk];
          break;
        }
    }
  });
  return A;
}

PlateSolution solve_plate(const DomainMask& mask, const ScalarField& f,
                          double gamma, double tol, bool throw_on_fail) {
  const SparseMatrix A = assemble_plate(mask, gamma);
  PlateSolution sol{ScalarField(mask), {}};
  sol.stats = solve_spd(A, f.values, sol.u.values, tol);
  if (!sol.stats.converged && throw_on_fail)
    throw std::runtime_error("plate solve did not converge: residual " +
                             std::to_string(sol.stats.final_residual));
  return sol;
}

EnergyReport energy_report(const DomainMask& mask, const ScalarField& u,
                           const ScalarField& f, double gamma) {
  const SparseMatrix B = assemble_biharmonic(mask);
  const SparseMatrix L = assemble_laplacian(mask);
  const std::size_t n = mask.interior_count();
  std::vector<double> tmp(n);
  const double w = u.quadrature_weight();

  EnergyReport rep;
  spmv(B, u.values, tmp);
  rep.bend = w * par::dot(u.values, tmp);
  spmv(L, u.values, tmp);
  rep.stretch = w * par::dot(u.values, tmp);
  rep.work = w * par::dot(f.values, u.values);
  const double scale = std::max(std::abs(rep.work), 1e-300);
  rep.identity_residual =
      std::abs(rep.bend + gamma * rep.stretch - rep.work) / scale;
  return rep;
}

GradientBoundReport check_gradient_bound(const DomainMask& mask,
                                         const ScalarField& u,
                                         const ScalarField& f, double t) {
  GradientBoundReport rep;
  rep.lhs = gradient_lt_norm(u, t);
  const double w = u.quadrature_weight();
  const double work = w * par::dot(f.values, u.values);
  const double dpow =
      std::pow(mask.diameter, (2.0 / t) * (3.0 - static_cast<double>(mask.dim)));
  rep.rhs_unit_sqrt = dpow * std::sqrt(std::max(work, 0.0));
  rep.rhs_unit_lin = dpow * work;
  rep.implied_sqrt = rep.rhs_unit_sqrt > 0.0 ? rep.lhs / rep.rhs_unit_sqrt : 0.0;
  rep.implied_lin = rep.rhs_unit_lin > 0.0 ? rep.lhs / rep.rhs_unit_lin : 0.0;
  return rep;
}

}  // namespace plate
