#include "critmass/radial.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include "critmass/constants.hpp"
#include "critmass/errors.hpp"

namespace critmass {

namespace {

constexpr double kProfileTolerance = 1e-12;

void check_size(const GridPtr& grid, std::size_t n, const char* what) {
  if (!grid) throw std::invalid_argument(std::string(what) + ": null grid");
  if (grid->size() != n) {
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(n) +
                                " samples for a grid of " + std::to_string(grid->size()) +
                                " nodes");
  }
}

}  // namespace

MassProfile::MassProfile(GridPtr grid, std::vector<double> values, double total_mass)
    : grid_(std::move(grid)), values_(std::move(values)), mass_(total_mass) {
  check_size(grid_, values_.size(), "MassProfile");
  if (!(mass_ >= 0.0) || !std::isfinite(mass_)) {
    throw std::invalid_argument("MassProfile: total mass must be finite and nonnegative");
  }
  const double tol = kProfileTolerance * std::max(mass_, 1e-300);
  const std::size_t last = values_.size() - 1;
  if (std::abs(values_[0]) > tol) throw NodeError("MassProfile: M(0) != 0", 0);
  if (std::abs(values_[last] - mass_) > tol) throw NodeError("MassProfile: M(1) != m", last);
  values_[0] = 0.0;
  values_[last] = mass_;
  for (std::size_t i = 1; i < last; ++i) {
    double& v = values_[i];
    if (!std::isfinite(v)) throw NodeError("MassProfile: non-finite value", i);
    if (v < -tol || v > mass_ + tol) throw NodeError("MassProfile: value outside [0, m]", i);
    if (v < values_[i - 1] - tol) throw NodeError("MassProfile: decreasing in xi", i);
    v = std::clamp(v, values_[i - 1], mass_);
  }
}

MassProfile MassProfile::linear(GridPtr grid, double total_mass) {
  std::vector<double> values(grid->size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = total_mass * (*grid)[i];
  return MassProfile(std::move(grid), std::move(values), total_mass);
}

std::vector<double> MassProfile::deviation() const {
  std::vector<double> w(values_.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = values_[i] - mass_ * (*grid_)[i];
  w.front() = 0.0;
  w.back() = 0.0;
  return w;
}

double MassProfile::sup_ratio() const {
  double best = 0.0;
  for (std::size_t i = 1; i < values_.size(); ++i) {
    best = std::max(best, values_[i] / (*grid_)[i]);
  }
  return best;
}

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  check_size(grid_, values_.size(), "RadialField");
}

PotentialSlope::PotentialSlope(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  check_size(grid_, values_.size(), "PotentialSlope");
}

MassProfile mass_from_density(const RadialField& u) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] >= 0.0)) throw NodeError("mass_from_density: negative density sample", i);
  }
  // 2 pi r dr = pi dxi
  std::vector<double> mass = cumulative_trapezoid(u.grid(), u.values());
  for (double& v : mass) v *= kPi;
  const double total = mass.back();
  return MassProfile(u.grid_ptr(), std::move(mass), total);
}

RadialField density_from_mass(const MassProfile& mass) {
  const Grid& grid = mass.grid();
  const double m = mass.total_mass();
  const std::vector<double> w = mass.deviation();
  std::vector<double> u = differentiate(grid, w);
  const std::size_t last = u.size() - 1;
  // one-sided endpoint stencils may undershoot on steep profiles; fall back to
  // the adjacent chord slope which is nonnegative for a valid profile
  auto chord = [&](std::size_t i) { return (mass[i + 1] - mass[i]) / grid.spacing(i); };
  if (m + u[0] < 0.0) u[0] = chord(0) - m;
  if (m + u[last] < 0.0) u[last] = chord(last - 1) - m;
  const double noise = kProfileTolerance * m;
  for (double& v : u) {
    v = (m + v) / kPi;
    if (v < 0.0 && v >= -noise) v = 0.0;
    v = std::max(v, 0.0);
  }
  return RadialField(mass.grid_ptr(), std::move(u));
}

PotentialSlope potential_slope_from_mass(const MassProfile& mass) {
  const Grid& grid = mass.grid();
  const std::vector<double> w = mass.deviation();
  std::vector<double> slope(w.size(), 0.0);
  for (std::size_t i = 1; i < w.size(); ++i) {
    slope[i] = -w[i] / (2.0 * kPi * std::sqrt(grid[i]));
  }
  return PotentialSlope(mass.grid_ptr(), std::move(slope));
}

RadialField potential_from_slope(const PotentialSlope& slope) {
  const std::vector<double> r = slope.radii();
  std::vector<double> v(r.size(), 0.0);
  for (std::size_t i = 1; i < r.size(); ++i) {
    v[i] = v[i - 1] + 0.5 * (r[i] - r[i - 1]) * (slope[i] + slope[i - 1]);
  }
  const double mean = trapezoid(slope.grid(), v).value;
  for (double& x : v) x -= mean;
  return RadialField(slope.grid_ptr(), std::move(v));
}

Integral disk_integral(const RadialField& f) {
  Integral q = trapezoid(f.grid(), f.values());
  return {kPi * q.value, kPi * q.error_estimate};
}

Integral disk_average(const RadialField& f) {
  const Integral q = disk_integral(f);
  return {q.value / kPi, q.error_estimate / kPi};
}

Integral second_moment(const MassProfile& mass) {
  const Integral q = trapezoid(mass.grid(), mass.values());
  return {mass.total_mass() - q.value, q.error_estimate};
}

Integral density_second_moment(const RadialField& u) {
  // 2 pi r^3 dr = pi xi dxi
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u[i] * u.grid()[i];
  const Integral q = trapezoid(u.grid(), f);
  return {kPi * q.value, kPi * q.error_estimate};
}

PresetKind parse_preset_kind(std::string_view name) {
  if (name == "constant") return PresetKind::constant;
  if (name == "pks") return PresetKind::pks;
  if (name == "barrier") return PresetKind::barrier;
  throw std::invalid_argument("unknown preset kind '" + std::string(name) + "'");
}

std::string_view to_string(PresetKind kind) {
  switch (kind) {
    case PresetKind::constant: return "constant";
    case PresetKind::pks: return "pks";
    case PresetKind::barrier: return "barrier";
  }
  return "unknown";
}

MassProfile preset_profile(PresetKind kind, double param, double total_mass, GridPtr grid) {
  if (!(total_mass > 0.0) || !std::isfinite(total_mass)) {
    throw std::invalid_argument("preset_profile: mass must be positive");
  }
  if (kind == PresetKind::constant) return MassProfile::linear(std::move(grid), total_mass);
  if (!(param > 0.0) || !std::isfinite(param)) {
    throw std::invalid_argument("preset_profile: parameter of '" + std::string(to_string(kind)) +
                                "' must be positive");
  }
  // The disk restriction of the scaled whole-plane profile has cumulative mass
  // 8 pi xi / (l^2 + xi); rescaled to m it is the concave family with a = l^2.
  const double a = kind == PresetKind::pks ? param * param : param;
  std::vector<double> values(grid->size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double xi = (*grid)[i];
    values[i] = total_mass * (a + 1.0) * xi / (a + xi);
  }
  values.back() = total_mass;
  return MassProfile(std::move(grid), std::move(values), total_mass);
}

void write_snapshot_csv(std::ostream& out, const MassProfile& mass) {
  const RadialField u = density_from_mass(mass);
  const PotentialSlope slope = potential_slope_from_mass(mass);
  const RadialField v = potential_from_slope(slope);
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  out << "xi,M,u,v_r,v\n";
  for (std::size_t i = 0; i < mass.size(); ++i) {
    out << mass.grid()[i] << ',' << mass[i] << ',' << u[i] << ',' << slope[i] << ',' << v[i]
        << '\n';
  }
  out.precision(old_precision);
}

}  // namespace critmass
