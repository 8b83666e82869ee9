#include "critmass/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "critmass/constants.hpp"
#include "critmass/errors.hpp"
#include "critmass/stencil.hpp"

namespace critmass {

namespace {

void check_family(double parameter, double mass, const char* name) {
  if (!(parameter > 0.0) || !std::isfinite(parameter)) {
    throw std::invalid_argument(std::string(name) + ": family parameter must be positive");
  }
  if (!(mass > 0.0) || mass > kCriticalMass) {
    throw std::invalid_argument(std::string(name) + ": mass must lie in (0, 8 pi]");
  }
}

void check_open_interval(double xi) {
  if (!(xi > 0.0 && xi < 1.0)) {
    throw std::domain_error("operator Q is evaluated on the open interval (0, 1), got xi = " +
                            std::to_string(xi));
  }
}

constexpr double kEnvelopeMargin = 1e-6;

}  // namespace

SuperBarrier::SuperBarrier(double a, double mass) : a_(a), m_(mass) {
  check_family(a, mass, "SuperBarrier");
}

double SuperBarrier::slope(double xi) const {
  const double d = a_ + xi;
  return m_ * (a_ + 1.0) * a_ / (d * d);
}

double SuperBarrier::curvature(double xi) const {
  const double d = a_ + xi;
  return -2.0 * m_ * (a_ + 1.0) * a_ / (d * d * d);
}

std::vector<double> SuperBarrier::sample(const Grid& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(grid[i]);
  out.back() = m_;
  return out;
}

std::vector<double> SuperBarrier::sample_deviation(const Grid& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = deviation(grid[i]);
  return out;
}

SubBarrier::SubBarrier(double b, double mass) : b_(b), m_(mass) {
  check_family(b, mass, "SubBarrier");
}

double SubBarrier::slope(double xi) const {
  const double d = b_ + 1.0 - xi;
  return m_ * (b_ + 1.0) * b_ / (d * d);
}

double SubBarrier::curvature(double xi) const {
  const double d = b_ + 1.0 - xi;
  return 2.0 * m_ * (b_ + 1.0) * b_ / (d * d * d);
}

std::vector<double> SubBarrier::sample(const Grid& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(grid[i]);
  out.back() = m_;
  return out;
}

std::vector<double> SubBarrier::sample_deviation(const Grid& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = deviation(grid[i]);
  return out;
}

double apply_q(double deviation, double slope, double curvature, double /*mass*/, double xi) {
  // -WW'/pi + m xi W'/pi = -(W - m xi) W'/pi
  return -4.0 * xi * curvature - deviation * slope / kPi;
}

OperatorResidual apply_q(const SuperBarrier& barrier, double xi) {
  check_open_interval(xi);
  return {xi, apply_q(barrier.deviation(xi), barrier.slope(xi), barrier.curvature(xi),
                      barrier.mass(), xi)};
}

OperatorResidual apply_q(const SubBarrier& barrier, double xi) {
  check_open_interval(xi);
  return {xi, apply_q(barrier.deviation(xi), barrier.slope(xi), barrier.curvature(xi),
                      barrier.mass(), xi)};
}

OperatorResidual apply_q(const MassProfile& profile, std::size_t node) {
  const Grid& grid = profile.grid();
  if (node == 0 || node + 1 >= grid.size()) {
    throw std::domain_error("operator Q is evaluated at interior nodes only");
  }
  const double m = profile.total_mass();
  auto dev = [&](std::size_t i) { return profile[i] - m * grid[i]; };
  const double wl = node == 1 ? 0.0 : dev(node - 1);
  const double wc = dev(node);
  const double wr = node + 2 == grid.size() ? 0.0 : dev(node + 1);
  const StencilWeights d1 = first_derivative_weights(grid, node);
  const StencilWeights d2 = second_derivative_weights(grid, node);
  const double slope = m + d1.left * wl + d1.center * wc + d1.right * wr;
  const double curvature = d2.left * wl + d2.center * wc + d2.right * wr;
  return {grid[node], apply_q(wc, slope, curvature, m, grid[node])};
}

double residual_super_closed_form(double a, double mass, double xi) {
  const double d = a + xi;
  return mass * xi * (a + 1.0) * a / (d * d * d) * (kCriticalMass - mass + mass * xi) / kPi;
}

double residual_sub_closed_form(double b, double mass, double xi) {
  const double d = b + 1.0 - xi;
  return -mass * xi * (b + 1.0) * b / (kPi * d * d * d) * (kCriticalMass - mass + mass * xi);
}

double residual_finite_difference(const std::function<WideReal(WideReal)>& deviation,
                                  double mass, double xi) {
  check_open_interval(xi);
  const WideReal x = xi;
  const WideReal h = WideReal(1e-5) * x;
  const WideReal wm = deviation(x - h);
  const WideReal w0 = deviation(x);
  const WideReal wp = deviation(x + h);
  const WideReal d1 = (wp - wm) / (2 * h);
  const WideReal d2 = (wp - 2 * w0 + wm) / (h * h);
  const WideReal pi = std::numbers::pi_v<long double>;
  return static_cast<double>(-4 * x * d2 - w0 * (WideReal(mass) + d1) / pi);
}

double residual_super_fd(double a, double mass, double xi) {
  const WideReal wa = a;
  const WideReal wm = mass;
  return residual_finite_difference([=](WideReal x) { return wm * x * (1 - x) / (wa + x); },
                                    mass, xi);
}

double residual_sub_fd(double b, double mass, double xi) {
  const WideReal wb = b;
  const WideReal wm = mass;
  return residual_finite_difference(
      [=](WideReal x) { return -wm * x * (1 - x) / (wb + 1 - x); }, mass, xi);
}

std::vector<ResidualAuditRow> residual_audit(BarrierFamily family,
                                             std::span<const double> parameters,
                                             std::span<const double> masses,
                                             std::span<const double> xis) {
  std::vector<ResidualAuditRow> rows;
  rows.reserve(parameters.size() * masses.size() * xis.size());
  for (double p : parameters) {
    for (double m : masses) {
      for (double xi : xis) {
        ResidualAuditRow row{p, m, xi, 0.0, 0.0, 0.0};
        if (family == BarrierFamily::super) {
          row.closed_form = residual_super_closed_form(p, m, xi);
          row.finite_difference = residual_super_fd(p, m, xi);
        } else {
          row.closed_form = residual_sub_closed_form(p, m, xi);
          row.finite_difference = residual_sub_fd(p, m, xi);
        }
        row.abs_error = std::abs(row.closed_form - row.finite_difference);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi >= lo)) throw std::invalid_argument("log_space: need 0 < lo <= hi");
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) out[k] = lo * std::exp(step * static_cast<double>(k));
  out.back() = hi;
  return out;
}

double default_derivative_bound(const MassProfile& profile) {
  const RadialField u = density_from_mass(profile);
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s = kPi * u[i];
    if (!(s > 0.0)) throw NodeError("derivative bound: density vanishes", i);
    worst = std::max({worst, s, 1.0 / s});
  }
  return 1.1 * 2.0 * worst;
}

namespace {

void check_chord_slopes(const MassProfile& profile, double bound) {
  const double m = profile.total_mass();
  if (!(bound > m)) {
    throw std::invalid_argument("envelope construction needs a derivative bound C > m");
  }
  const Grid& grid = profile.grid();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double s = (profile[i + 1] - profile[i]) / grid.spacing(i);
    if (!(s > 1.0 / bound && s < bound)) {
      throw NodeError("envelope construction: discrete derivative " + std::to_string(s) +
                          " outside (1/C, C)",
                      i);
    }
  }
}

}  // namespace

double envelope_kink(double mass, double bound) {
  return (mass - 1.0 / bound) / (bound - 1.0 / bound);
}

SuperBarrier find_dominating_super(const MassProfile& profile, double bound) {
  check_chord_slopes(profile, bound);
  const double m = profile.total_mass();
  const double xi0 = envelope_kink(m, bound);
  const double target = bound * xi0 + kEnvelopeMargin * m;
  if (!(target < m && target > m * xi0)) {
    throw std::domain_error("envelope construction: no room for a strict margin");
  }
  const double a = xi0 * (m - target) / (target - m * xi0);
  SuperBarrier barrier(a, m);
  const Grid& grid = profile.grid();
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (barrier.value(grid[i]) < profile[i]) {
      throw NodeError("envelope construction failed to dominate", i);
    }
  }
  return barrier;
}

SuperBarrier find_dominating_super(const MassProfile& profile) {
  return find_dominating_super(profile, default_derivative_bound(profile));
}

SubBarrier find_dominated_sub(const MassProfile& profile, double bound) {
  check_chord_slopes(profile, bound);
  const double m = profile.total_mass();
  const double xi1 = (bound - m) / (bound - 1.0 / bound);
  const double target = xi1 / bound - kEnvelopeMargin * m;
  if (!(target > 0.0 && target < m * xi1)) {
    throw std::domain_error("envelope construction: no room for a strict margin");
  }
  const double b = target * (1.0 - xi1) / (m * xi1 - target);
  SubBarrier barrier(b, m);
  const Grid& grid = profile.grid();
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (barrier.value(grid[i]) > profile[i]) {
      throw NodeError("envelope construction failed to stay below", i);
    }
  }
  return barrier;
}

SubBarrier find_dominated_sub(const MassProfile& profile) {
  return find_dominated_sub(profile, default_derivative_bound(profile));
}

std::optional<std::size_t> ordering_violation(std::span<const double> upper,
                                              std::span<const double> lower, double tolerance) {
  for (std::size_t i = 0; i < upper.size(); ++i) {
    if (upper[i] < lower[i] - tolerance) return i;
  }
  return std::nullopt;
}

double separation_margin(const Grid& grid, std::span<const double> upper,
                         std::span<const double> lower) {
  if (upper.size() != grid.size() || lower.size() != grid.size()) {
    throw std::invalid_argument("separation_margin: profiles must share the grid");
  }
  double scale = 1.0;
  for (std::size_t i = 0; i < upper.size(); ++i) {
    scale = std::max({scale, std::abs(upper[i]), std::abs(lower[i])});
  }
  const double tol = 1e-12 * scale;
  const std::size_t last = grid.size() - 1;
  if (std::abs(upper[0] - lower[0]) > tol) throw NodeError("separation_margin: endpoint mismatch", 0);
  if (std::abs(upper[last] - lower[last]) > tol) {
    throw NodeError("separation_margin: endpoint mismatch", last);
  }
  if (auto node = ordering_violation(upper, lower, tol)) {
    throw NodeError("separation_margin: upper profile below lower profile", *node);
  }
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < last; ++i) {
    const double xi = grid[i];
    margin = std::min(margin, (upper[i] - lower[i]) / (xi * (1.0 - xi)));
  }
  return margin;
}

}  // namespace critmass
