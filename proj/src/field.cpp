#include "plate/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "plate/par.hpp"

namespace plate {

ScalarField make_field(const DomainMask& mask,
                       const std::function<double(const Point&)>& f) {
  ScalarField v(mask);
  par::parallel_for(mask.interior_count(), [&](std::size_t c) {
    v.values[c] = f(mask.node_point(mask.cells[c]));
  });
  return v;
}

double integral(const ScalarField& v) {
  return v.quadrature_weight() *
         par::sum_indexed(v.values.size(),
                          [&](std::size_t i) { return v.values[i]; });
}

double integral_over(const ScalarField& v, std::span<const int> cells,
                     const std::function<double(double)>& f) {
  return v.quadrature_weight() *
         par::sum_indexed(cells.size(),
                          [&](std::size_t i) { return f(v.values[cells[i]]); });
}

Point gradient_at(const ScalarField& v, int cell) {
  const DomainMask& m = *v.mask;
  const auto [i, j, k] = m.node_coords(m.cells[cell]);
  Point g{0, 0, 0};
  const std::array<std::array<int, 3>, 3> axes{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int ax = 0; ax < m.dim; ++ax) {
    const auto& e = axes[ax];
    const int ip = m.is_interior(i + e[0], j + e[1], k + e[2])
                       ? m.compact_id[m.node_id(i + e[0], j + e[1], k + e[2])]
                       : -1;
    const int im = m.is_interior(i - e[0], j - e[1], k - e[2])
                       ? m.compact_id[m.node_id(i - e[0], j - e[1], k - e[2])]
                       : -1;
    if (ip >= 0 && im >= 0)
      g[ax] = (v.values[ip] - v.values[im]) / (2.0 * m.h);
    else if (ip >= 0)
      g[ax] = (v.values[ip] - v.values[cell]) / m.h;
    else if (im >= 0)
      g[ax] = (v.values[cell] - v.values[im]) / m.h;
  }
  return g;
}

double gradient_norm_at(const ScalarField& v, int cell) {
  const Point g = gradient_at(v, cell);
  return std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
}

double gradient_lt_norm(const ScalarField& v, double t) {
  const double s = par::sum_indexed(v.values.size(), [&](std::size_t c) {
    return std::pow(gradient_norm_at(v, static_cast<int>(c)), t);
  });
  return std::pow(v.quadrature_weight() * s, 1.0 / t);
}

double gradient_t_integral(const ScalarField& v, std::span<const int> cells,
                           double t) {
  return v.quadrature_weight() *
         par::sum_indexed(cells.size(), [&](std::size_t i) {
           return std::pow(gradient_norm_at(v, cells[i]), t);
         });
}

double min_value(const ScalarField& v) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v.values) m = std::min(m, x);
  return m;
}

double max_value(const ScalarField& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v.values) m = std::max(m, x);
  return m;
}

ScalarField make_bump_field(const DomainMask& mask,
                            std::span<const GaussianBump> bumps) {
  ScalarField v(mask);
  par::parallel_for(mask.interior_count(), [&](std::size_t c) {
    const Point p = mask.node_point(mask.cells[c]);
    double s = 0.0;
    for (const auto& b : bumps) {
      const double r = dist(p, b.center);
      if (b.truncate_radius > 0.0 && r >= b.truncate_radius) continue;
      s += b.amplitude * std::exp(-r * r / (2.0 * b.width * b.width));
    }
    v.values[c] = s;
  });
  return v;
}

ScalarField make_calibration_field(const DomainMask& mask, std::uint64_t seed) {
  Rng rng(seed);
  const double dmax = mask.max_interior_distance();

  // candidate bump centers sit well inside the domain
  std::vector<int> deep;
  for (std::size_t c = 0; c < mask.interior_count(); ++c)
    if (mask.cell_dist[c] >= 0.3 * dmax) deep.push_back(static_cast<int>(c));
  if (deep.empty())
    for (std::size_t c = 0; c < mask.interior_count(); ++c)
      deep.push_back(static_cast<int>(c));

  const int nbumps = 1 + static_cast<int>(rng.below(5));
  std::vector<GaussianBump> bumps(nbumps);
  for (auto& b : bumps) {
    b.center = mask.node_point(mask.cells[deep[rng.below(deep.size())]]);
    b.width = rng.uniform(0.10, 0.35) * dmax;
    b.amplitude = rng.uniform(0.3, 1.5);
  }

  ScalarField v(mask);
  par::parallel_for(mask.interior_count(), [&](std::size_t c) {
    const Point p = mask.node_point(mask.cells[c]);
    double s = 0.0;
    for (const auto& b : bumps) {
      const double r = dist(p, b.center);
      s += b.amplitude * std::exp(-r * r / (2.0 * b.width * b.width));
    }
    const double env = mask.cell_dist[c];
    v.values[c] = env * env * s;
  });
  return v;
}

}  // namespace plate
