#include "plate/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "plate/linalg.hpp"
#include "plate/par.hpp"
#include "plate/plate_operator.hpp"

namespace plate {

double compute_gamma0(double f_integral, double d_omega, const ExponentSet& e,
                      double c, Gamma0Variant variant) {
  if (!(f_integral >= 0.0))
    throw std::invalid_argument("compute_gamma0: source integral negative");
  if (!(d_omega > 0.0) || !(c > 0.0))
    throw std::invalid_argument("compute_gamma0: needs d_omega > 0 and c > 0");
  const double eta_mult = variant == Gamma0Variant::two_eta ? 2.0 : 4.0;
  const double E = eta_mult * e.eta / (e.xi * (e.theta - 1.0));
  const double d_exp = E * ((2.0 / e.t) * (3.0 - e.N) * e.c + e.b);
  return std::pow(c, E) * std::pow(d_omega, d_exp) *
         std::pow(f_integral, e.a * E);
}

GammaScanResult scan_gamma(const DomainMask& mask, const ScalarField& f,
                           std::span<const double> gammas, double tol_pos,
                           const ExponentSet& e, double c) {
  if (min_value(f) < 0.0)
    throw std::invalid_argument("scan_gamma: source must be nonnegative");
  const double fint = integral(f);
  if (!(fint > 0.0))
    throw std::invalid_argument("scan_gamma: source integral must be positive");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (gammas[i] < 0.0 || (i > 0 && gammas[i] <= gammas[i - 1]))
      throw std::invalid_argument(
          "scan_gamma: gamma grid must be increasing and nonnegative");
  }

  GammaScanResult res;
  res.f_integral = fint;
  res.diameter = mask.diameter;
  res.c_used = c;
  res.gamma0_two_eta =
      compute_gamma0(fint, mask.diameter, e, c, Gamma0Variant::two_eta);
  res.gamma0_four_eta =
      compute_gamma0(fint, mask.diameter, e, c, Gamma0Variant::four_eta);
  res.domain = to_string(mask.shape_tag);

  const double w = f.quadrature_weight();
  for (double g : gammas) {
    const auto sol = solve_plate(mask, f, g, 1e-10, false);
    res.gammas.push_back(g);
    res.converged.push_back(sol.stats.converged ? 1 : 0);
    res.all_converged = res.all_converged && sol.stats.converged;
    res.min_u.push_back(min_value(sol.u));
    res.max_u.push_back(max_value(sol.u));
    const double work =
        w * par::sum_indexed(f.values.size(), [&](std::size_t i) {
          return f[i] * sol.u[i];
        });
    res.energy.push_back(work);
    if (sol.stats.converged && work > 0.0 && !(res.max_u.back() > 0.0))
      res.lemma_positive_max = false;
  }

  for (std::size_t i = 0; i < res.gammas.size(); ++i) {
    if (res.converged[i] &&
        res.min_u[i] >= -tol_pos * std::max(res.max_u[i], 0.0)) {
      res.has_gamma_star = true;
      res.gamma_star_empirical = res.gammas[i];
      break;
    }
  }
  return res;
}

std::vector<std::vector<std::uint8_t>> make_exhaustion(const DomainMask& mask,
                                                       int levels) {
  if (levels < 1)
    throw std::invalid_argument("make_exhaustion: needs at least one level");
  const double dmax = mask.max_interior_distance();
  std::vector<std::vector<std::uint8_t>> omegas;
  for (int m = 1; m <= levels; ++m) {
    const double delta = dmax / std::pow(2.0, m);
    std::vector<std::uint8_t> chi(mask.interior_count(), 0);
    for (std::size_t cell = 0; cell < mask.interior_count(); ++cell)
      chi[cell] = mask.cell_dist[cell] > delta ? 1 : 0;
    omegas.push_back(std::move(chi));
  }
  return omegas;
}

Decomposition decompose_source(const ScalarField& f,
                               std::span<const std::vector<std::uint8_t>> omegas) {
  const DomainMask& mask = *f.mask;
  Decomposition dec;
  dec.weight_sum = ScalarField(mask);

  for (std::size_t m = 0; m < omegas.size(); ++m) {
    if (omegas[m].size() != mask.interior_count())
      throw std::invalid_argument("decompose_source: mask size mismatch");
    const double wm = 1.0 / static_cast<double>((m + 1) * (m + 1));
    for (std::size_t cell = 0; cell < mask.interior_count(); ++cell)
      if (omegas[m][cell]) dec.weight_sum[cell] += wm;
  }

  for (std::size_t cell = 0; cell < mask.interior_count(); ++cell)
    if (f[cell] != 0.0 && dec.weight_sum[cell] == 0.0)
      throw std::runtime_error("source escapes exhaustion");

  for (std::size_t m = 0; m < omegas.size(); ++m) {
    const double wm = 1.0 / static_cast<double>((m + 1) * (m + 1));
    ScalarField g(mask);
    for (std::size_t cell = 0; cell < mask.interior_count(); ++cell)
      if (omegas[m][cell] && dec.weight_sum[cell] > 0.0)
        g[cell] = wm / dec.weight_sum[cell] * f[cell];
    dec.parts.push_back(std::move(g));
  }
  dec.omegas.assign(omegas.begin(), omegas.end());
  return dec;
}

SuperpositionReport superposition_check(const DomainMask& mask, double gamma,
                                        const Decomposition& dec,
                                        double solve_tol) {
  ScalarField f(mask);
  for (const auto& g : dec.parts)
    for (std::size_t cell = 0; cell < mask.interior_count(); ++cell)
      f[cell] += g[cell];

  SuperpositionReport rep;
  const auto whole = solve_plate(mask, f, gamma, solve_tol, false);
  rep.all_converged = whole.stats.converged;

  double ref = 0.0;
  for (double v : whole.u.values) ref = std::max(ref, std::abs(v));
  if (ref == 0.0) ref = 1.0;

  ScalarField acc(mask);
  for (const auto& g : dec.parts) {
    const auto part = solve_plate(mask, g, gamma, solve_tol, false);
    rep.all_converged = rep.all_converged && part.stats.converged;
    double gap = 0.0;
    for (std::size_t cell = 0; cell < mask.interior_count(); ++cell) {
      acc[cell] += part.u[cell];
      gap = std::max(gap, std::abs(whole.u[cell] - acc[cell]));
    }
    rep.partial_gaps.push_back(gap / ref);
  }
  rep.rel_gap = rep.partial_gaps.empty() ? 0.0 : rep.partial_gaps.back();
  return rep;
}

InterpolationResult interpolation_scan(const DomainMask& mask,
                                       const ScalarField& f, double gamma0,
                                       int n_tau, double tol_pos) {
  if (n_tau < 2)
    throw std::invalid_argument("interpolation_scan: needs n_tau >= 2");
  if (!(gamma0 >= 0.0))
    throw std::invalid_argument("interpolation_scan: gamma0 must be >= 0");

  InterpolationResult res;
  auto positive = [&](double lo, double hi) {
    return lo >= -tol_pos * std::max(hi, 0.0);
  };
  for (int i = 0; i < n_tau; ++i) {
    const double tau = static_cast<double>(i) / (n_tau - 1);
    const auto sol = solve_plate(mask, f, tau * gamma0, 1e-10, false);
    res.taus.push_back(tau);
    res.gamma_taus.push_back(tau * gamma0);
    res.min_w.push_back(min_value(sol.u));
    res.max_w.push_back(max_value(sol.u));
    res.all_converged = res.all_converged && sol.stats.converged;
  }

  res.endpoints_positive = positive(res.min_w.front(), res.max_w.front()) &&
                           positive(res.min_w.back(), res.max_w.back());
  res.all_positive = true;
  for (std::size_t i = 0; i < res.min_w.size(); ++i)
    res.all_positive = res.all_positive && positive(res.min_w[i], res.max_w[i]);

  if (!res.endpoints_positive)
    res.verdict = "endpoint hypothesis fails";
  else if (res.all_positive)
    res.verdict = "positivity persists at every interpolation point";
  else
    res.verdict = "interior positivity lost";
  return res;
}

namespace {

ShapeSpec dilate_spec(const ShapeSpec& base, double s) {
  ShapeSpec d = base;
  for (int ax = 0; ax < 3; ++ax) d.extent[ax] = base.extent[ax] * s;
  d.radius = base.radius * s;
  d.radius_inner = base.radius_inner * s;
  d.radius_outer = base.radius_outer * s;
  d.side = base.side * s;
  d.lobe = base.lobe * s;
  d.corridor_length = base.corridor_length * s;
  d.corridor_width = base.corridor_width * s;
  if (base.tag == ShapeTag::custom) {
    auto inner = base.inside;
    d.inside = [inner, s](const Point& p) {
      return inner({p[0] / s, p[1] / s, p[2] / s});
    };
    for (int ax = 0; ax < 3; ++ax) {
      d.lo[ax] = base.lo[ax] * s;
      d.hi[ax] = base.hi[ax] * s;
    }
  }
  return d;
}

}  // namespace

DilationReport check_dilation(const ShapeSpec& base_spec,
                              const std::function<double(const Point&)>& f,
                              double gamma, double s, double solve_tol) {
  if (!(s > 0.0)) throw std::invalid_argument("check_dilation: s must be > 0");

  const DomainMask base = build_domain(base_spec);
  const DomainMask big = build_domain(dilate_spec(base_spec, s));

  const ScalarField fb = make_field(base, f);
  const double s4 = s * s * s * s;
  const ScalarField fs = make_field(big, [&](const Point& y) {
    return f({y[0] / s, y[1] / s, y[2] / s}) / s4;
  });

  const auto u = solve_plate(base, fb, gamma, solve_tol, false);
  const auto v = solve_plate(big, fs, gamma / (s * s), solve_tol, false);

  DilationReport rep;
  rep.converged = u.stats.converged && v.stats.converged;

  double ref = 0.0;
  for (double val : u.u.values) ref = std::max(ref, std::abs(val));
  if (ref == 0.0) ref = 1.0;

  double gap = 0.0;
  for (std::size_t cell = 0; cell < base.interior_count(); ++cell) {
    const Point x = base.node_point(base.cells[cell]);
    const int img = big.cell_at({x[0] * s, x[1] * s, x[2] * s});
    if (img < 0) continue;  // image node clipped by the dilated mask margin
    gap = std::max(gap, std::abs(v.u[img] - u.u[cell]));
  }
  rep.rel_gap = gap / ref;
  return rep;
}

}  // namespace plate
