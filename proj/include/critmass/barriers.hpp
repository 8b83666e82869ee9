#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "critmass/grid.hpp"
#include "critmass/radial.hpp"

namespace critmass {

/**
 * Concave family W_a(xi) = m (a+1) xi / (a + xi), a > 0, m in (0, 8 pi].
 *
 * Each member satisfies W(0) = 0, W(1) = m and is a strict supersolution of
 * the stationary operator Q on (0, 1). It tends to m as a -> 0 and to m xi as
 * a -> infinity.
 */
class SuperBarrier {
 public:
  SuperBarrier(double a, double mass);

  double parameter() const { return a_; }
  double mass() const { return m_; }

  double value(double xi) const { return m_ * (a_ + 1.0) * xi / (a_ + xi); }
  /// W(xi) - m xi, evaluated without cancellation.
  double deviation(double xi) const { return m_ * xi * (1.0 - xi) / (a_ + xi); }
  double slope(double xi) const;
  double curvature(double xi) const;

  /// Sup of W/xi, attained at xi -> 0.
  double ratio_bound() const { return m_ * (a_ + 1.0) / a_; }

  std::vector<double> sample(const Grid& grid) const;
  std::vector<double> sample_deviation(const Grid& grid) const;

 private:
  double a_;
  double m_;
};

/// Convex family W_b(xi) = m b xi / (b + 1 - xi); strict subsolutions of Q.
class SubBarrier {
 public:
  SubBarrier(double b, double mass);

  double parameter() const { return b_; }
  double mass() const { return m_; }

  double value(double xi) const { return m_ * b_ * xi / (b_ + 1.0 - xi); }
  double deviation(double xi) const { return -m_ * xi * (1.0 - xi) / (b_ + 1.0 - xi); }
  double slope(double xi) const;
  double curvature(double xi) const;

  std::vector<double> sample(const Grid& grid) const;
  std::vector<double> sample_deviation(const Grid& grid) const;

 private:
  double b_;
  double m_;
};

struct OperatorResidual {
  double xi = 0.0;
  double value = 0.0;
};

/// Q W = -4 xi W'' - W W'/pi + m xi W'/pi, written with the deviation
/// W - m xi so that near-linear profiles do not cancel catastrophically.
double apply_q(double deviation, double slope, double curvature, double mass, double xi);

/// Q on a barrier with its analytic derivatives. xi must lie in (0, 1).
OperatorResidual apply_q(const SuperBarrier& barrier, double xi);
OperatorResidual apply_q(const SubBarrier& barrier, double xi);

/// Q on a mass profile at an interior node using the centered stencils.
OperatorResidual apply_q(const MassProfile& profile, std::size_t node);

/// [m xi (a+1) a / (a+xi)^3] (8 pi - m + m xi) / pi.
double residual_super_closed_form(double a, double mass, double xi);

/// -[m xi (b+1) b / (pi (b+1-xi)^3)] (8 pi - m + m xi).
double residual_sub_closed_form(double b, double mass, double xi);

#ifdef __SIZEOF_FLOAT128__
using WideReal = __float128;
#else
using WideReal = long double;
#endif

/// Central-difference Q of a function given through its deviation from m xi,
/// evaluated in quad precision (where available) with step h = 1e-5 xi.
double residual_finite_difference(const std::function<WideReal(WideReal)>& deviation,
                                  double mass, double xi);
double residual_super_fd(double a, double mass, double xi);
double residual_sub_fd(double b, double mass, double xi);

enum class BarrierFamily { super, sub };

/// One line of the residual audit: closed form against the finite-difference
/// oracle at a single (parameter, m, xi).
struct ResidualAuditRow {
  double parameter = 0.0;
  double mass = 0.0;
  double xi = 0.0;
  double closed_form = 0.0;
  double finite_difference = 0.0;
  double abs_error = 0.0;
};

/// Cartesian product of the inputs, parameters outermost.
std::vector<ResidualAuditRow> residual_audit(BarrierFamily family,
                                             std::span<const double> parameters,
                                             std::span<const double> masses,
                                             std::span<const double> xis);

/// n values spaced evenly in log between lo and hi inclusive.
std::vector<double> log_space(double lo, double hi, std::size_t n);

/// 1.1 * 2 * max over nodes of max(pi u, 1/(pi u)).
double default_derivative_bound(const MassProfile& profile);

/**
 * Envelope construction: a concave barrier lying above the profile.
 *
 * Requires C > m and every chord slope of M in (1/C, C). The profile is below
 * min(C xi, m - (1 - xi)/C), whose kink sits at xi0 = (m - 1/C)/(C - 1/C);
 * the returned parameter is the largest a with W_a(xi0) = that bound + 1e-6 m.
 * Throws NodeError naming the first offending interval on a bound violation.
 */
SuperBarrier find_dominating_super(const MassProfile& profile, double bound);
SuperBarrier find_dominating_super(const MassProfile& profile);

/// Kink of the upper envelope used by find_dominating_super.
double envelope_kink(double mass, double bound);

/// Mirror construction with the convex family; the result lies below the profile.
SubBarrier find_dominated_sub(const MassProfile& profile, double bound);
SubBarrier find_dominated_sub(const MassProfile& profile);

/// First node where upper < lower - tolerance, if any.
std::optional<std::size_t> ordering_violation(std::span<const double> upper,
                                              std::span<const double> lower, double tolerance);

/**
 * min over interior nodes of (upper - lower) / (xi (1 - xi)).
 *
 * Both samples must share the grid and the endpoint values; ordering
 * violations beyond 1e-12 of the sample scale raise NodeError.
 */
double separation_margin(const Grid& grid, std::span<const double> upper,
                         std::span<const double> lower);

}  // namespace critmass
