#pragma once

/// @file positivity.hpp
/// @brief Threshold computation, gamma scans, source decomposition, dilation.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "plate/exponents.hpp"
#include "plate/field.hpp"
#include "plate/geometry.hpp"

namespace plate {

/// The threshold formula ships in two variants because the source derivation
/// carries exponent 2 eta / (xi (theta - 1)) in one display and 4 eta in the
/// companion bound; both are reported rather than reconciled silently.
enum class Gamma0Variant { two_eta, four_eta };

double compute_gamma0(double f_integral, double d_omega, const ExponentSet& e,
                      double c, Gamma0Variant variant);

struct GammaScanResult {
  std::vector<double> gammas;
  std::vector<double> min_u, max_u, energy;  // energy = <f, u> quadrature
  std::vector<char> converged;
  bool all_converged = true;
  bool lemma_positive_max = true;  // work > 0 implied max u > 0 at every point
  double f_integral = 0.0;
  double diameter = 0.0;
  double c_used = 0.0;
  double gamma0_two_eta = 0.0;
  double gamma0_four_eta = 0.0;
  bool has_gamma_star = false;
  double gamma_star_empirical = 0.0;  // first grid gamma with min_u above -tol
  std::string domain;
};

GammaScanResult scan_gamma(const DomainMask& mask, const ScalarField& f,
                           std::span<const double> gammas, double tol_pos,
                           const ExponentSet& e, double c);

/// Nested exhaustion by interior-distance superlevel sets with halving
/// thresholds: omega_m = {cells with interior_distance > dmax / 2^m}.
std::vector<std::vector<std::uint8_t>> make_exhaustion(const DomainMask& mask,
                                                       int levels);

struct Decomposition {
  std::vector<std::vector<std::uint8_t>> omegas;
  ScalarField weight_sum;          // S = sum over m of chi_m / m^2
  std::vector<ScalarField> parts;  // g_m = (chi_m / m^2) f / S
};

/// Splits f across the exhaustion so the parts sum back to f exactly.
/// Throws "source escapes exhaustion" when f is nonzero outside the union.
Decomposition decompose_source(const ScalarField& f,
                               std::span<const std::vector<std::uint8_t>> omegas);

struct SuperpositionReport {
  double rel_gap = 0.0;  // |solve(f) - sum solve(g_m)|_inf / |solve(f)|_inf
  std::vector<double> partial_gaps;  // after summing the first m parts
  bool all_converged = true;
};

SuperpositionReport superposition_check(const DomainMask& mask, double gamma,
                                        const Decomposition& dec,
                                        double solve_tol = 1e-10);

struct InterpolationResult {
  std::vector<double> taus;
  std::vector<double> gamma_taus;
  std::vector<double> min_w, max_w;
  bool all_converged = true;
  bool endpoints_positive = false;
  bool all_positive = false;
  std::string verdict;
};

/// Solves at gamma = tau * gamma0 on a uniform tau grid in [0, 1] and
/// records whether positivity at the endpoints persists in between.
InterpolationResult interpolation_scan(const DomainMask& mask,
                                       const ScalarField& f, double gamma0,
                                       int n_tau, double tol_pos);

struct DilationReport {
  double rel_gap = 0.0;  // max node gap against the pulled-back base solve
  bool converged = true;
};

/// Blow-up consistency: solving on s * Omega with gamma / s^2 and source
/// s^-4 f(y / s) at the same spacing h must reproduce the base solution at
/// the shared lattice points up to discretization error. The default solve
/// tolerance is loose because discretization error dominates this gap by
/// many orders of magnitude.
DilationReport check_dilation(const ShapeSpec& base_spec,
                              const std::function<double(const Point&)>& f,
                              double gamma, double s, double solve_tol = 1e-8);

}  // namespace plate
