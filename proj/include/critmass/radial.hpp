#pragma once

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "critmass/grid.hpp"
#include "critmass/stencil.hpp"

namespace critmass {

/**
 * Cumulative mass M(xi) = 2*pi * int_0^sqrt(xi) u(r) r dr on a grid.
 *
 * Invariants: M(0) = 0, M(1) = m, 0 <= M <= m, nondecreasing. The constructor
 * accepts violations up to 1e-12*m (pinning endpoints and repairing the noise)
 * and rejects anything larger with a NodeError.
 */
class MassProfile {
 public:
  MassProfile(GridPtr grid, std::vector<double> values, double total_mass);

  /// The constant-density steady state M = m*xi.
  static MassProfile linear(GridPtr grid, double total_mass);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double total_mass() const { return mass_; }

  /// M_i - m*xi_i; identically zero for the constant state.
  std::vector<double> deviation() const;

  /// max over xi_i > 0 of M_i / xi_i.
  double sup_ratio() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
  double mass_;
};

/// Nodal samples of a radial function at r_i = sqrt(xi_i): a density u or a
/// potential v.
class RadialField {
 public:
  RadialField(GridPtr grid, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  std::vector<double> radii() const { return grid_->radii(); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Radial derivative v_r of the potential at r_i = sqrt(xi_i).
class PotentialSlope {
 public:
  PotentialSlope(GridPtr grid, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::vector<double> radii() const { return grid_->radii(); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Trapezoid cumulative mass; rejects negative density samples.
MassProfile mass_from_density(const RadialField& u);

/// u(sqrt(xi_i)) = M_xi(xi_i) / pi.
RadialField density_from_mass(const MassProfile& mass);

/// v_r(sqrt(xi)) = -(M(xi) - m xi) / (2 pi sqrt(xi)), with the limit 0 at r = 0.
PotentialSlope potential_slope_from_mass(const MassProfile& mass);

/// Integrates v_r in r and fixes the constant so the disk average vanishes.
RadialField potential_from_slope(const PotentialSlope& slope);

inline RadialField potential_from_mass(const MassProfile& mass) {
  return potential_from_slope(potential_slope_from_mass(mass));
}

/// 2*pi * int_0^1 f r dr (= pi * int_0^1 f dxi).
Integral disk_integral(const RadialField& f);

/// Disk average (1/pi) * disk_integral.
Integral disk_average(const RadialField& f);

/// m - int_0^1 M dxi, the second moment int u |x|^2 dx.
Integral second_moment(const MassProfile& mass);

/// 2*pi * int_0^1 u r^3 dr evaluated directly on the density.
Integral density_second_moment(const RadialField& u);

enum class PresetKind { constant, pks, barrier };

/// Parses "constant", "pks" or "barrier"; throws std::invalid_argument otherwise.
PresetKind parse_preset_kind(std::string_view name);
std::string_view to_string(PresetKind kind);

/**
 * Initial-data presets with total mass exactly m.
 *
 *  - constant: M = m xi
 *  - pks:      the stationary whole-plane profile 8 l^2/(l^2 + r^2)^2 with
 *              l = param, restricted to the disk and rescaled to mass m
 *  - barrier:  m (a+1) xi / (a + xi) with a = param
 *
 * The parameter is ignored for constant and must be positive otherwise.
 */
MassProfile preset_profile(PresetKind kind, double param, double total_mass, GridPtr grid);

/// Writes the snapshot schema `xi,M,u,v_r,v` with 17 significant digits.
void write_snapshot_csv(std::ostream& out, const MassProfile& mass);

}  // namespace critmass
