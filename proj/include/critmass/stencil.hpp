#pragma once

#include <span>
#include <vector>

#include "critmass/grid.hpp"

namespace critmass {

/// A quadrature result together with its truncation-error estimate.
struct Integral {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Three-point coefficients of a nonuniform stencil at one node.
struct StencilWeights {
  double left = 0.0;
  double center = 0.0;
  double right = 0.0;
};

// Second-order centered first derivative at an interior node.
StencilWeights first_derivative_weights(const Grid& grid, std::size_t i);
// Second-order second derivative at an interior node.
StencilWeights second_derivative_weights(const Grid& grid, std::size_t i);

/// d/dxi of nodal samples: centered in the interior, one-sided
/// second order at both endpoints.
std::vector<double> differentiate(const Grid& grid, std::span<const double> f);

/// Second xi-derivative at interior nodes; endpoint entries are copied from
/// their neighbours.
std::vector<double> second_differentiate(const Grid& grid, std::span<const double> f);

/// Composite trapezoid rule over [0, 1]. The error estimate compares against
/// the rule on every other node (Richardson, divided by 3).
Integral trapezoid(const Grid& grid, std::span<const double> f);

/// Running trapezoid integral from xi = 0; entry 0 is zero.
std::vector<double> cumulative_trapezoid(const Grid& grid, std::span<const double> f);

}  // namespace critmass
