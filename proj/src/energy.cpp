#include "critmass/energy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "critmass/constants.hpp"
#include "critmass/stencil.hpp"

namespace critmass {

double log_floor(double mass) { return 1e-14 * mass / kPi; }

namespace {

double field_mass(const RadialField& u) { return disk_integral(u).value; }

struct LogDensity {
  std::vector<double> values;
  std::size_t clamped = 0;
};

LogDensity floored_log(const RadialField& u) {
  const double floor = log_floor(std::max(field_mass(u), 0.0));
  LogDensity out;
  out.values.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double x = u[i];
    if (x < floor) {
      x = floor;
      ++out.clamped;
    }
    // floor may itself be 0 for a vanishing density
    out.values[i] = x > 0.0 ? std::log(x) : 0.0;
  }
  return out;
}

Integral free_energy_integral(const RadialField& u, std::span<const double> v,
                              const LogDensity& log_u) {
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u[i] * log_u.values[i] - 0.5 * u[i] * v[i];
  const Integral q = trapezoid(u.grid(), f);
  return {kPi * q.value, kPi * q.error_estimate};
}

// pi * int_0^1 u (2 sqrt(xi) d_xi ln u - v_r)^2 dxi
Integral dissipation_integral(const RadialField& u, std::span<const double> slope,
                              const LogDensity& log_u) {
  const Grid& grid = u.grid();
  const std::vector<double> dlog = differentiate(grid, log_u.values);
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double flux = 2.0 * std::sqrt(grid[i]) * dlog[i] - slope[i];
    f[i] = u[i] * flux * flux;
  }
  const Integral q = trapezoid(grid, f);
  return {kPi * q.value, kPi * q.error_estimate};
}

std::vector<double> slope_from_potential(const RadialField& v) {
  const Grid& grid = v.grid();
  std::vector<double> s = differentiate(grid, v.values());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= 2.0 * std::sqrt(grid[i]);
  return s;
}

void check_same_grid(const RadialField& u, const Grid& other) {
  if (!u.grid().same_nodes(other)) throw std::invalid_argument("fields must share a grid");
}

}  // namespace

double free_energy(const RadialField& u, const RadialField& v) {
  check_same_grid(u, v.grid());
  return free_energy_integral(u, v.values(), floored_log(u)).value;
}

double dissipation(const RadialField& u, const RadialField& v) {
  check_same_grid(u, v.grid());
  return dissipation_integral(u, slope_from_potential(v), floored_log(u)).value;
}

double dissipation(const RadialField& u, const PotentialSlope& slope) {
  check_same_grid(u, slope.grid());
  return dissipation_integral(u, slope.values(), floored_log(u)).value;
}

EnergyReport evaluate_energy(const RadialField& u, const RadialField& v) {
  check_same_grid(u, v.grid());
  const LogDensity log_u = floored_log(u);
  const Integral f = free_energy_integral(u, v.values(), log_u);
  const Integral d = dissipation_integral(u, slope_from_potential(v), log_u);
  return {f.value, d.value, f.error_estimate, d.error_estimate, log_u.clamped};
}

EnergyReport evaluate_energy(const MassProfile& mass) {
  const RadialField u = density_from_mass(mass);
  const PotentialSlope slope = potential_slope_from_mass(mass);
  const RadialField v = potential_from_slope(slope);
  const LogDensity log_u = floored_log(u);
  const Integral f = free_energy_integral(u, v.values(), log_u);
  const Integral d = dissipation_integral(u, slope.values(), log_u);
  return {f.value, d.value, f.error_estimate, d.error_estimate, log_u.clamped};
}

namespace {

void check_history(std::span<const double> t, std::span<const double> energy,
                   std::span<const double> dissipation) {
  if (t.size() != energy.size() || t.size() != dissipation.size()) {
    throw std::invalid_argument("energy history columns differ in length");
  }
  if (t.empty()) throw std::invalid_argument("energy history is empty");
}

}  // namespace

DecayReport audit_decay(std::span<const double> t, std::span<const double> energy,
                        std::span<const double> dissipation) {
  check_history(t, energy, dissipation);
  DecayReport report;
  double scale = 0.0;
  for (double f : energy) scale = std::max(scale, std::abs(f));
  for (std::size_t k = 1; k < t.size(); ++k) {
    report.max_increase = std::max(report.max_increase, energy[k] - energy[k - 1]);
    report.dissipated += 0.5 * (t[k] - t[k - 1]) * (dissipation[k] + dissipation[k - 1]);
  }
  report.max_increase_relative = scale > 0.0 ? report.max_increase / scale : report.max_increase;
  report.energy_drop = energy.front() - energy.back();
  report.budget_residual = std::abs(report.energy_drop - report.dissipated);
  const double drop = std::abs(report.energy_drop);
  report.budget_relative = drop > 1e-300 ? report.budget_residual / drop : report.budget_residual;
  return report;
}

DecayReport audit_decay(const SimulationTrace& trace) {
  return audit_decay(trace.times(), trace.energies(), trace.dissipations());
}

std::vector<EnergyAuditRow> energy_audit_rows(std::span<const double> t,
                                              std::span<const double> energy,
                                              std::span<const double> dissipation) {
  check_history(t, energy, dissipation);
  const std::size_t n = t.size();
  std::vector<EnergyAuditRow> rows(n);
  double dissipated = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) dissipated += 0.5 * (t[k] - t[k - 1]) * (dissipation[k] + dissipation[k - 1]);
    double rate = 0.0;
    if (n >= 2) {
      if (k == 0) {
        rate = (energy[1] - energy[0]) / (t[1] - t[0]);
      } else if (k + 1 == n) {
        rate = (energy[k] - energy[k - 1]) / (t[k] - t[k - 1]);
      } else {
        const double hm = t[k] - t[k - 1];
        const double hp = t[k + 1] - t[k];
        const double sm = (energy[k] - energy[k - 1]) / hm;
        const double sp = (energy[k + 1] - energy[k]) / hp;
        rate = (hp * sm + hm * sp) / (hm + hp);
      }
    }
    rows[k] = {t[k], energy[k], dissipation[k], rate, (energy[0] - energy[k]) - dissipated};
  }
  return rows;
}

double loghls_margin(const RadialField& density) {
  const double lambda = field_mass(density);
  if (!(lambda > 0.0)) throw std::domain_error("log-HLS check needs positive mass");
  // a profile of mass exactly 8 pi may integrate slightly above it
  const double slack = std::max(1e-12 * kCriticalMass, 10.0 * disk_integral(density).error_estimate);
  if (lambda > kCriticalMass + slack) {
    throw std::domain_error("log-HLS check is stated for mass <= 8 pi");
  }
  for (std::size_t i = 0; i < density.size(); ++i) {
    if (density[i] < 0.0) throw std::domain_error("log-HLS check needs a nonnegative density");
  }
  const MassProfile mass = mass_from_density(density);
  const RadialField v = potential_from_mass(mass);
  return free_energy(density, v) - lambda * std::log(lambda / kPi);
}

std::vector<RadialField> random_radial_profiles(GridPtr grid, std::size_t count,
                                                std::uint64_t seed, double max_mass) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::vector<double> r = grid->radii();
  std::vector<RadialField> corpus;
  corpus.reserve(count);
  while (corpus.size() < count) {
    const double base = 0.05 + 0.95 * unit(rng);
    const int bumps = 1 + static_cast<int>(3.0 * unit(rng));
    struct Bump {
      double amplitude, center, width;
    };
    std::vector<Bump> shape;
    for (int k = 0; k < std::min(bumps, 3); ++k) {
      shape.push_back({-1.0 + 6.0 * unit(rng), unit(rng), 0.03 + 0.37 * unit(rng)});
    }
    const double target = max_mass * (1.0 - unit(rng));  // (0, max_mass]
    std::vector<double> u(r.size());
    bool nonnegative = true;
    for (std::size_t i = 0; i < r.size(); ++i) {
      double x = base;
      for (const Bump& b : shape) {
        const double z = (r[i] - b.center) / b.width;
        x += b.amplitude * std::exp(-0.5 * z * z);
      }
      if (x < 0.0) {
        nonnegative = false;
        break;
      }
      u[i] = x;
    }
    if (!nonnegative) continue;
    RadialField field(grid, u);
    const double scale = target / field_mass(field);
    for (double& x : u) x *= scale;
    corpus.emplace_back(grid, std::move(u));
  }
  return corpus;
}

}  // namespace critmass
