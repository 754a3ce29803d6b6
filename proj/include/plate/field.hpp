#pragma once

/// @file field.hpp
/// @brief Scalar fields over a DomainMask: quadrature, gradients, builders.

#include <functional>
#include <span>
#include <vector>

#include "plate/geometry.hpp"
#include "plate/rng.hpp"

namespace plate {

/// One value per interior node; implicit zero extension outside the mask.
/// The mask must outlive the field.
struct ScalarField {
  const DomainMask* mask = nullptr;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const DomainMask& m)
      : mask(&m), values(m.interior_count(), 0.0) {}

  double quadrature_weight() const {
    double w = mask->h * mask->h;
    if (mask->dim == 3) w *= mask->h;
    return w;
  }

  double operator[](std::size_t c) const { return values[c]; }
  double& operator[](std::size_t c) { return values[c]; }
};

ScalarField make_field(const DomainMask& mask,
                       const std::function<double(const Point&)>& f);

/// Integral of v over the mask with midpoint weight h^N.
double integral(const ScalarField& v);

/// Integral of f(v(x)) over the listed cells.
double integral_over(const ScalarField& v, std::span<const int> cells,
                     const std::function<double(double)>& f);

/// Centered differences where both axis neighbors are interior, one-sided
/// against the masked boundary, zero where the cell is isolated on an axis.
Point gradient_at(const ScalarField& v, int cell);

/// Euclidean norm of gradient_at, cached candidate for hot loops.
double gradient_norm_at(const ScalarField& v, int cell);

/// (integral over all interior cells of |grad v|^t)^(1/t).
double gradient_lt_norm(const ScalarField& v, double t);

/// Integral of |grad v|^t over the listed cells (no outer root).
double gradient_t_integral(const ScalarField& v, std::span<const int> cells,
                           double t);

double min_value(const ScalarField& v);
double max_value(const ScalarField& v);

struct GaussianBump {
  Point center{};
  double width = 0.1;
  double amplitude = 1.0;
  double truncate_radius = 0.0;  // 0 disables truncation
};

ScalarField make_bump_field(const DomainMask& mask,
                            std::span<const GaussianBump> bumps);

/// Smooth random field for the calibration suites: a sum of at most five
/// Gaussian bumps under the envelope interior_distance(x)^2, so the field
/// and its gradient vanish at the masked boundary.
ScalarField make_calibration_field(const DomainMask& mask, std::uint64_t seed);

}  // namespace plate
