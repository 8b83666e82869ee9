#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "critmass/radial.hpp"
#include "critmass/trace.hpp"

namespace critmass {

/// Free energy and dissipation of a state, with quadrature error estimates.
struct EnergyReport {
  double free_energy = 0.0;
  double dissipation = 0.0;
  double free_energy_error = 0.0;
  double dissipation_error = 0.0;
  std::size_t clamped_nodes = 0;  // samples floored inside the logarithm
};

/// Density floor used inside logarithms: 1e-14 m / pi.
double log_floor(double mass);

/// F(u) = 2 pi int (u ln u - u v / 2) r dr.
double free_energy(const RadialField& u, const RadialField& v);

/// D = 2 pi int u (d_r ln u - d_r v)^2 r dr, with d_r v taken from the samples of v.
double dissipation(const RadialField& u, const RadialField& v);

/// Same integrand with the potential gradient supplied directly.
double dissipation(const RadialField& u, const PotentialSlope& slope);

EnergyReport evaluate_energy(const RadialField& u, const RadialField& v);

/// Energy of a mass profile using its exact potential slope.
EnergyReport evaluate_energy(const MassProfile& mass);

/// Decay audit of a recorded energy history.
struct DecayReport {
  double max_increase = 0.0;           // largest F_{k+1} - F_k (0 if monotone)
  double max_increase_relative = 0.0;  // ... divided by max |F|
  double energy_drop = 0.0;            // F(0) - F(T)
  double dissipated = 0.0;             // int_0^T D dt (trapezoid)
  double budget_residual = 0.0;        // |drop - dissipated|
  double budget_relative = 0.0;        // budget_residual / |drop|
};

DecayReport audit_decay(std::span<const double> t, std::span<const double> energy,
                        std::span<const double> dissipation);
DecayReport audit_decay(const SimulationTrace& trace);

/// One row of `energy_audit.csv`.
struct EnergyAuditRow {
  double t = 0.0;
  double energy = 0.0;
  double dissipation = 0.0;
  double dfdt_estimate = 0.0;    // centered in time, one-sided at the ends
  double budget_residual = 0.0;  // (F(0) - F(t)) - int_0^t D
};

std::vector<EnergyAuditRow> energy_audit_rows(std::span<const double> t,
                                              std::span<const double> energy,
                                              std::span<const double> dissipation);

/// F(U) - lambda ln(lambda/pi) for a radial profile of mass lambda <= 8 pi.
/// Throws std::domain_error when lambda exceeds 8 pi.
double loghls_margin(const RadialField& density);

/// Seeded corpus of smooth radial densities: a constant plus one to three
/// Gaussian bumps in r, rescaled to a mass drawn from (0, max_mass].
std::vector<RadialField> random_radial_profiles(GridPtr grid, std::size_t count,
                                                std::uint64_t seed, double max_mass);

}  // namespace critmass
