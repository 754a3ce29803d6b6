#pragma once

/// @file harnack.hpp
/// @brief Harnack-type ball inequality, level dichotomy, chain oscillation.

#include <cstdint>

#include "plate/exponents.hpp"
#include "plate/field.hpp"
#include "plate/geometry.hpp"
#include "plate/levelset.hpp"

namespace plate {

/// Levels k in (min u, max u) over a ball split into a lower interval I2
/// where the closed superlevel set {u >= k} still covers at least half the
/// ball, and an upper interval I1 where the open superlevel set {u > k}
/// covers less than half. When both are nonempty the crossover level k0 is
/// the midpoint of the discrete bracketing pair.
struct LevelDichotomy {
  bool i1_empty = true;
  bool i2_empty = true;
  double i1_lo = 0.0, i1_hi = 0.0;  // I1 = [i1_lo, i1_hi) up to max u
  double i2_lo = 0.0, i2_hi = 0.0;  // I2 = (i2_lo, i2_hi] down to min u
  bool has_k0 = false;
  double k0 = 0.0;
};

LevelDichotomy classify_levels(const ScalarField& u, const Point& center,
                               double r);

struct HarnackReport {
  double sup_half = 0.0;  // sup over B(center, r/2)
  double inf_full = 0.0;  // inf over B(center, r)
  double r_power = 0.0;
  double grad_t_term = 0.0;
  double grad_2_term = 0.0;
  double rhs_unit = 0.0;  // r_power * grad_t_term * grad_2_term
  double implied_constant = 0.0;
  bool has_k0 = false;
  double k0 = 0.0;
  bool pass = true;
};

/// sup over the half ball against inf over the full ball plus the gradient
/// right side with furnished constant c. Adding a constant to u changes
/// nothing: the left side is a difference and the right side sees only
/// the gradient.
HarnackReport harnack_check(const ScalarField& u, const ExponentSet& e,
                            const Point& center, double r, double c);

struct OscillationReport {
  double u_max = 0.0;
  double u_min = 0.0;
  int h = 0;  // hops in the connecting chain
  double rhs_unit = 0.0;
  double implied_constant = 0.0;
  bool pass = true;
  ChainReport chain;
};

/// Oscillation bound along a chain of overlapping balls: u(x_max) against
/// u(x_min) plus c times hops times the global gradient terms. The two
/// points must be r-deep; the chain comes from geometry::chain_of_balls.
OscillationReport chain_bound(const ScalarField& u, const ExponentSet& e,
                              const Point& x_max, const Point& x_min, double r,
                              double c);

Calibration calibrate_harnack(const DomainMask& mask, const ExponentSet& e,
                              int fields, std::uint64_t seed);

SuiteOutcome validate_harnack(const DomainMask& mask, const ExponentSet& e,
                              double c, int fields, std::uint64_t seed);

}  // namespace plate
