#pragma once

/// @file exponents.hpp
/// @brief The exponent bundle driving every level-set estimate.
///
/// From the admissible parameters (N, t, p, q) with N < t, 1 < p, and
/// 2 < q < 2p, the bundle derives the interpolation exponent s in (1, N),
/// its Sobolev conjugate s* = N s / (N - s), the growth exponent beta, the
/// root theta > 1 of theta^2 - theta/p - beta = 0, the normalized pair
/// (xi, eta) with xi = 1, the iteration rate mu, and the three derived
/// constants a < 1, b, c used by the threshold formulas.

#include <string>

namespace plate {

struct ExponentSet {
  int N = 2;
  double t = 5.0, p = 2.0, q = 3.0;
  double s = 0.0, s_star = 0.0;
  double beta = 0.0, theta = 0.0;
  double xi = 1.0, eta = 0.0;
  double mu = 0.0;
  double a = 0.0, b = 0.0, c = 0.0;
};

/// Throws std::invalid_argument:
///   "inadmissible (p,q) for this N" when s falls outside (1, N),
///   "degenerate exponent system" when theta fails to exceed 1,
/// and plain argument errors for out-of-range N, t, p, q.
ExponentSet derive_exponents(int N, double t, double p, double q);

struct ExponentResiduals {
  double quadratic = 0.0;   // |theta^2 - theta/p - beta|
  double system_row1 = 0.0; // |xi/p + eta - theta xi|
  double system_row2 = 0.0; // |beta xi - theta eta|
  double s_star_identity = 0.0;  // |N s/(N-s) - 2q(p-1)/(2p-q)|
  bool theta_above_one = false;
  bool a_below_one = false;
};

ExponentResiduals validate_exponents(const ExponentSet& e);

std::string describe(const ExponentSet& e);

}  // namespace plate
