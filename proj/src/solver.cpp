#include "critmass/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "critmass/barriers.hpp"
#include "critmass/constants.hpp"
#include "critmass/energy.hpp"
#include "critmass/errors.hpp"
#include "critmass/stencil.hpp"

namespace critmass {

namespace {

constexpr double kRepairFlag = 1e-12;
constexpr double kSpikeFactor = 2.0;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("SchemeConfig: " + what);
}

// Upwind spacing for node i given the sign of the wave speed.
double upwind_spacing(const Grid& grid, std::size_t i, double speed) {
  return speed > 0.0 ? grid.spacing(i) : grid.spacing(i - 1);
}

// Solves the tridiagonal system in place; lower/upper are the off-diagonals
// of rows 0..n-1 (lower[0] and upper[n-1] unused).
void thomas(std::vector<double>& lower, std::vector<double>& diag, std::vector<double>& upper,
            std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double f = lower[i] / diag[i - 1];
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

// Collapse test behind the step floor: the transport speed at one of the
// innermost nodes exceeds the speed for which the first cell would need a
// step below dt_min.
constexpr std::size_t kInnermostNodes = 2;

bool innermost_speed_exceeds(const MassProfile& mass, double cfl, double floor) {
  const double limit_speed = cfl * mass.grid().spacing(1) / floor;
  const double m = mass.total_mass();
  for (std::size_t i = 1; i <= kInnermostNodes && i + 1 < mass.size(); ++i) {
    if ((mass[i] - m * mass.grid()[i]) / kPi > limit_speed) return true;
  }
  return false;
}

bool time_reached(double t, double target) {
  return t >= target - 1e-12 * std::max(1.0, std::abs(target));
}

}  // namespace

void SchemeConfig::validate(double mass) const {
  require(grid != nullptr, "grid is required");
  require(std::isfinite(mass) && mass > 0.0, "mass must be positive");
  require(cfl > 0.0 && cfl <= 1.0, "cfl must lie in (0, 1]");
  require(std::isfinite(t_end) && t_end > 0.0, "t_end must be positive");
  require(std::isfinite(snapshot_every) && snapshot_every > 0.0,
          "snapshot_every must be positive");
  require(std::isfinite(dt_max) && dt_max > 0.0, "dt_max must be positive");
  require(dt_grow >= 1.0 && std::isfinite(dt_grow), "dt_grow must be >= 1");
  if (u_blowup_threshold) require(*u_blowup_threshold > 0.0, "u_blowup_threshold must be positive");
  if (dt_min) require(std::isfinite(*dt_min) && *dt_min > 0.0, "dt_min must be positive");
  require(std::isfinite(dt0) && dt0 > step_floor(), "dt0 must exceed dt_min");
}

double SchemeConfig::blowup_threshold(double mass) const {
  return u_blowup_threshold.value_or(1e6 * mass / kPi);
}

double SchemeConfig::step_floor() const {
  if (dt_min) return *dt_min;
  return cfl * grid->spacing(1) / 6.0;
}

CflViolation::CflViolation(double dt, double limit)
    : std::runtime_error("step: dt = " + std::to_string(dt) + " exceeds the transport limit " +
                         std::to_string(limit)),
      limit_(limit) {}

double max_stable_dt(const MassProfile& mass, double cfl) {
  const Grid& grid = mass.grid();
  const std::vector<double> w = mass.deviation();
  double limit = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    const double speed = w[i] / kPi;
    if (speed == 0.0) continue;
    limit = std::min(limit, upwind_spacing(grid, i, speed) / std::abs(speed));
  }
  return cfl * limit;
}

bool centered_transport(const Grid& grid, std::size_t i, double mass) {
  // Speeds satisfy -m xi/pi <= c <= m (1 - xi)/pi for every admissible
  // profile; within that range the centered row keeps nonpositive off-diagonals.
  const double xi = grid[i];
  return mass * (1.0 - xi) * grid.spacing(i) <= 8.0 * kPi * xi &&
         mass * grid.spacing(i - 1) <= 8.0 * kPi;
}

StepResult step(const MassProfile& mass, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("step: dt must be positive and finite");
  }
  const double limit = max_stable_dt(mass);
  if (dt > limit * (1.0 + 1e-12)) throw CflViolation(dt, limit);

  const Grid& grid = mass.grid();
  const double m = mass.total_mass();
  const std::vector<double> w = mass.deviation();
  const std::size_t n = w.size();
  const std::size_t k = n - 2;  // interior unknowns

  // Deviation form: w_t = 4 xi w_xixi + c (m + w_xi) with c = w/pi lagged.
  std::vector<double> rhs(k), lower(k, 0.0), diag(k), upper(k, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double speed = w[i] / kPi;
    const StencilWeights d2 = second_derivative_weights(grid, i);
    StencilWeights d1;
    if (centered_transport(grid, i, m)) {
      d1 = first_derivative_weights(grid, i);
    } else if (speed > 0.0) {
      d1 = {0.0, -1.0 / grid.spacing(i), 1.0 / grid.spacing(i)};
    } else {
      d1 = {-1.0 / grid.spacing(i - 1), 1.0 / grid.spacing(i - 1), 0.0};
    }
    const double diffusion = 4.0 * grid[i];
    lower[i - 1] = -dt * (diffusion * d2.left + speed * d1.left);
    diag[i - 1] = 1.0 - dt * (diffusion * d2.center + speed * d1.center);
    upper[i - 1] = -dt * (diffusion * d2.right + speed * d1.right);
    rhs[i - 1] = w[i] + dt * speed * m;
  }
  thomas(lower, diag, upper, rhs);

  std::vector<double> values(n);
  values[0] = 0.0;
  values[n - 1] = m;
  double repair = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double raw = m * grid[i] + rhs[i - 1];
    if (!std::isfinite(raw)) throw NodeError("step: non-finite update", i);
    const double fixed = std::clamp(raw, values[i - 1], m);
    repair = std::max(repair, std::abs(fixed - raw));
    values[i] = fixed;
  }
  MassProfile next(mass.grid_ptr(), std::move(values), m);
  return {std::move(next), repair, repair > kRepairFlag * m};
}

Diagnostics diagnose(double t, double dt, const MassProfile& mass) {
  const RadialField u = density_from_mass(mass);
  const EnergyReport energy = evaluate_energy(mass);
  Diagnostics d;
  d.t = t;
  d.dt = dt;
  d.sup_u = *std::max_element(u.values().begin(), u.values().end());
  d.sup_ratio = mass.sup_ratio();
  d.energy = energy.free_energy;
  d.dissipation = energy.dissipation;
  d.second_moment = second_moment(mass).value;
  return d;
}

std::size_t interior_peak(const MassProfile& mass) {
  const RadialField u = density_from_mass(mass);
  const auto values = u.values();
  return static_cast<std::size_t>(
      std::max_element(values.begin() + 1, values.end() - 1) - values.begin());
}

std::optional<BlowupReport> detect_blowup(double t, const MassProfile& mass,
                                          const SchemeConfig& config) {
  const RadialField u = density_from_mass(mass);
  const auto values = u.values();
  const double sup = *std::max_element(values.begin(), values.end());
  if (!(sup > config.blowup_threshold(mass.total_mass()))) return std::nullopt;
  const std::size_t node = interior_peak(mass);
  return BlowupReport{BlowupReport::Trigger::threshold, t, node, mass.grid()[node], sup};
}

SimulationTrace simulate(const SchemeConfig& config, const MassProfile& initial,
                         const StepObserver& observer) {
  const double m = initial.total_mass();
  config.validate(m);
  if (!initial.grid().same_nodes(*config.grid)) {
    throw std::invalid_argument("simulate: initial profile is not on the configured grid");
  }
  const double floor = config.step_floor();

  SimulationTrace trace;
  trace.mass = m;
  MassProfile state = initial;
  double t = 0.0;
  Diagnostics last = diagnose(0.0, 0.0, state);
  trace.rows.push_back(last);
  trace.snapshots.push_back({0.0, state});
  std::size_t snapshot_index = 1;
  double next_snapshot = config.snapshot_every;

  auto floor_hit = [&] {
    const std::size_t node = interior_peak(state);
    trace.blowup = BlowupReport{BlowupReport::Trigger::step_floor, t, node, state.grid()[node],
                                last.sup_u};
    trace.verdict = node == 1 ? Verdict::blowup_detected : Verdict::step_floor_reached;
  };

  if (auto report = detect_blowup(0.0, state, config)) {
    trace.blowup = report;
    trace.verdict = Verdict::blowup_detected;
    trace.final_profile = state;
    return trace;
  }

  double nominal = config.dt0;
  bool stopped = false;
  while (!stopped && !time_reached(t, config.t_end)) {
    if (innermost_speed_exceeds(state, config.cfl, floor)) {
      floor_hit();
      break;
    }
    nominal = std::min({nominal, config.dt_max, max_stable_dt(state, config.cfl)});
    const double landing = std::min(next_snapshot, config.t_end);
    double dt = nominal;
    bool lands = false;
    if (time_reached(t + dt, landing)) {
      dt = landing - t;
      lands = true;
    }

    StepResult result = step(state, dt);
    Diagnostics d = diagnose(lands ? landing : t + dt, dt, result.profile);
    const bool spike = last.sup_u > 0.0 && d.sup_u > kSpikeFactor * last.sup_u;
    if (result.flagged || spike) {
      ++trace.rejected_steps;
      nominal = 0.5 * dt;
      if (nominal < floor) {
        floor_hit();
        break;
      }
      continue;
    }

    t = d.t;
    state = std::move(result.profile);
    if (result.repair > 0.0) ++trace.repaired_steps;
    trace.rows.push_back(d);
    last = d;
    if (observer) observer(t, state);
    if (lands && time_reached(t, next_snapshot)) {
      trace.snapshots.push_back({t, state});
      ++snapshot_index;
      next_snapshot = static_cast<double>(snapshot_index) * config.snapshot_every;
    }
    if (auto report = detect_blowup(t, state, config)) {
      trace.blowup = report;
      trace.verdict = Verdict::blowup_detected;
      stopped = true;
    }
    nominal = std::max(nominal, dt) * config.dt_grow;
  }
  trace.final_profile = state;
  return trace;
}

ComparisonReport verify_discrete_comparison(const MassProfile& lower0,
                                            const MassProfile& upper0, double t_end,
                                            const SchemeConfig& config) {
  const double m = lower0.total_mass();
  if (upper0.total_mass() != m) throw std::invalid_argument("comparison: masses differ");
  if (!lower0.grid().same_nodes(upper0.grid())) {
    throw std::invalid_argument("comparison: profiles are on different grids");
  }
  if (auto node = ordering_violation(upper0.values(), lower0.values(), 1e-12 * m)) {
    throw NodeError("comparison: initial data are not ordered", *node);
  }
  const double floor = config.step_floor();
  ComparisonReport report{0.0, 0.0, 0, 0, lower0, upper0};
  double t = 0.0;
  double nominal = config.dt0;
  while (!time_reached(t, t_end)) {
    nominal = std::min({nominal, config.dt_max, max_stable_dt(report.lower, config.cfl),
                        max_stable_dt(report.upper, config.cfl)});
    if (nominal < floor) throw std::runtime_error("comparison: step floor reached");
    double dt = nominal;
    if (time_reached(t + dt, t_end)) dt = t_end - t;
    report.lower = step(report.lower, dt).profile;
    report.upper = step(report.upper, dt).profile;
    t += dt;
    ++report.steps;
    for (std::size_t i = 0; i < report.lower.size(); ++i) {
      const double gap = report.lower[i] - report.upper[i];
      if (gap > report.max_violation) {
        report.max_violation = gap;
        report.violation_time = t;
        report.violation_node = i;
      }
    }
    nominal = std::max(nominal, dt) * config.dt_grow;
  }
  return report;
}

double bound_gradient_v(const SimulationTrace& trace) {
  double best = 0.0;
  for (const Diagnostics& d : trace.rows) best = std::max(best, d.sup_ratio);
  return (best + trace.mass) / (2.0 * kPi);
}

}  // namespace critmass
