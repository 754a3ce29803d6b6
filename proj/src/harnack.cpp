#include "plate/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "plate/par.hpp"

namespace plate {

namespace {

constexpr double kSlack = 1e-12;

double harnack_rhs_unit(const ScalarField& u, const ExponentSet& e,
                        std::span<const int> cells, double r,
                        HarnackReport* terms) {
  const double w = u.quadrature_weight();
  const double gt = w * par::sum_indexed(cells.size(), [&](std::size_t i) {
                      return std::pow(gradient_norm_at(u, cells[i]), e.t);
                    });
  const double g2 = w * par::sum_indexed(cells.size(), [&](std::size_t i) {
                      const double g = gradient_norm_at(u, cells[i]);
                      return g * g;
                    });
  const double r_power =
      std::pow(r, (e.xi / e.eta + e.N / 2.0) * (e.theta - 1.0));
  const double t_term =
      std::pow(gt, (e.xi / e.eta) * (e.p - 1.0) / (e.t * e.p));
  const double s_term = std::pow(g2, e.xi * (e.theta - 1.0) / (2.0 * e.eta));
  if (terms != nullptr) {
    terms->r_power = r_power;
    terms->grad_t_term = t_term;
    terms->grad_2_term = s_term;
  }
  return r_power * t_term * s_term;
}

}  // namespace

LevelDichotomy classify_levels(const ScalarField& u, const Point& center,
                               double r) {
  const auto cells = ball_cells(*u.mask, {center, r});
  std::vector<double> vals(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) vals[i] = u[cells[i]];
  std::sort(vals.begin(), vals.end());

  LevelDichotomy out;
  const std::size_t n = vals.size();
  if (n == 0 || vals.front() == vals.back()) return out;  // constant field

  const double lo = vals.front(), hi = vals.back();
  const double half = n / 2.0;

  // Open superlevel count #{u > v} drops below half at the first value of
  // an up-set; closed count #{u >= v} stays at or above half up to the last
  // value of a down-set. Both step functions change only at cell values.
  double inf_i1 = hi;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t above =
        n - (std::upper_bound(vals.begin(), vals.end(), vals[i]) -
             vals.begin());
    if (static_cast<double>(above) < half) {
      inf_i1 = vals[i];
      break;
    }
  }
  double sup_i2 = lo;
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t at_or_above =
        n - (std::lower_bound(vals.begin(), vals.end(), vals[i]) -
             vals.begin());
    if (static_cast<double>(at_or_above) >= half) {
      sup_i2 = vals[i];
      break;
    }
  }

  if (inf_i1 < hi) {
    out.i1_empty = false;
    out.i1_lo = inf_i1;
    out.i1_hi = hi;
  }
  if (sup_i2 > lo) {
    out.i2_empty = false;
    out.i2_lo = lo;
    out.i2_hi = sup_i2;
  }
  if (!out.i1_empty && !out.i2_empty) {
    out.has_k0 = true;
    out.k0 = 0.5 * (inf_i1 + sup_i2);
  }
  return out;
}

HarnackReport harnack_check(const ScalarField& u, const ExponentSet& e,
                            const Point& center, double r, double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("harnack_check: c must be >= 0");
  const auto full = ball_cells(*u.mask, {center, r});
  const auto half = ball_cells(*u.mask, {center, r / 2.0});

  HarnackReport rep;
  rep.sup_half = -std::numeric_limits<double>::infinity();
  for (int cell : half) rep.sup_half = std::max(rep.sup_half, u[cell]);
  rep.inf_full = std::numeric_limits<double>::infinity();
  for (int cell : full) rep.inf_full = std::min(rep.inf_full, u[cell]);

  rep.rhs_unit = harnack_rhs_unit(u, e, full, r, &rep);

  const auto dich = classify_levels(u, center, r);
  rep.has_k0 = dich.has_k0;
  rep.k0 = dich.k0;

  const double gap = rep.sup_half - rep.inf_full;
  rep.implied_constant =
      rep.rhs_unit > 0.0
          ? std::max(0.0, gap) / rep.rhs_unit
          : (gap > kSlack ? std::numeric_limits<double>::infinity() : 0.0);
  rep.pass = rep.sup_half <=
             rep.inf_full + c * rep.rhs_unit +
                 kSlack * (std::abs(rep.inf_full) + c * rep.rhs_unit + 1.0);
  return rep;
}

OscillationReport chain_bound(const ScalarField& u, const ExponentSet& e,
                              const Point& x_max, const Point& x_min, double r,
                              double c) {
  const DomainMask& mask = *u.mask;
  const int cmax = mask.cell_at(x_max);
  const int cmin = mask.cell_at(x_min);
  if (cmax < 0 || cmin < 0)
    throw std::invalid_argument("chain_bound: point not in domain");

  OscillationReport rep;
  rep.u_max = u[cmax];
  rep.u_min = u[cmin];

  if (dist(x_max, x_min) == 0.0) {
    rep.h = 0;
    rep.rhs_unit = 0.0;
    rep.implied_constant = 0.0;
    rep.pass = rep.u_max <= rep.u_min + kSlack;
    return rep;
  }

  rep.chain = chain_of_balls(mask, x_max, x_min, r);
  rep.h = rep.chain.length;

  const double gt = std::pow(gradient_lt_norm(u, e.t), e.t);
  const double g2 = std::pow(gradient_lt_norm(u, 2.0), 2.0);
  rep.rhs_unit = rep.h *
                 std::pow(r, (e.xi / e.eta + e.N / 2.0) * (e.theta - 1.0)) *
                 std::pow(gt, e.xi * (e.p - 1.0) / (e.t * e.p * e.eta)) *
                 std::pow(g2, e.xi * (e.theta - 1.0) / (2.0 * e.eta));

  const double gap = rep.u_max - rep.u_min;
  rep.implied_constant =
      rep.rhs_unit > 0.0
          ? std::max(0.0, gap) / rep.rhs_unit
          : (gap > kSlack ? std::numeric_limits<double>::infinity() : 0.0);
  rep.pass = rep.u_max <=
             rep.u_min + c * rep.rhs_unit +
                 kSlack * (std::abs(rep.u_min) + c * rep.rhs_unit + 1.0);
  return rep;
}

Calibration calibrate_harnack(const DomainMask& mask, const ExponentSet& e,
                              int fields, std::uint64_t seed) {
  Calibration cal;
  cal.fields = fields;
  cal.seed = seed;
  for (int i = 0; i < fields; ++i) {
    const std::uint64_t fs = suite_field_seed(seed, i);
    const ScalarField u = make_calibration_field(mask, fs);
    const Probe pr = make_probe(mask, u, fs + 1);
    const auto rep = harnack_check(u, e, pr.center, pr.r, 1.0);
    const double implied = std::isfinite(rep.implied_constant)
                               ? rep.implied_constant
                               : 0.0;
    cal.implied.push_back(implied);
    cal.max_implied = std::max(cal.max_implied, implied);
  }
  cal.c = cal.max_implied > 0.0 ? 1.5 * cal.max_implied : 1.0;
  return cal;
}

SuiteOutcome validate_harnack(const DomainMask& mask, const ExponentSet& e,
                              double c, int fields, std::uint64_t seed) {
  SuiteOutcome out;
  for (int i = 0; i < fields; ++i) {
    const std::uint64_t fs = suite_field_seed(seed, i);
    const ScalarField u = make_calibration_field(mask, fs);
    const Probe pr = make_probe(mask, u, fs + 1);
    const auto hr = harnack_check(u, e, pr.center, pr.r, c);

    CheckReport rep;
    rep.check = "harnack_holdout";
    rep.center = pr.center;
    rep.r = pr.r;
    rep.lhs = hr.sup_half - hr.inf_full;
    rep.rhs_unit = c * hr.rhs_unit;
    rep.implied_constant = hr.implied_constant;
    rep.pass = hr.pass;
    out.reports.push_back(rep);
    ++out.evaluated;
    if (!rep.pass) ++out.violations;
  }
  return out;
}

}  // namespace plate
