#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include "critmass/grid.hpp"
#include "critmass/radial.hpp"
#include "critmass/trace.hpp"

namespace critmass {

/// Time-stepping parameters. Unset optionals take grid- or mass-relative defaults.
struct SchemeConfig {
  GridPtr grid;
  double dt0 = 0.01;
  double cfl = 0.45;
  double t_end = 10.0;
  double snapshot_every = 1.0;
  std::optional<double> u_blowup_threshold;  // default 1e6 m / pi
  std::optional<double> dt_min;              // default: see step_floor()
  double dt_max = 0.01;
  double dt_grow = 1.2;

  /// Throws std::invalid_argument on the first violated precondition.
  void validate(double mass) const;

  double blowup_threshold(double mass) const;

  /**
   * Smallest step the integrator accepts. The default, cfl * (xi_2 - xi_1) / 6,
   * is the step the first cell needs once its transport speed reaches 6, i.e.
   * once the mass in excess of m xi inside one of the two innermost nodes
   * reaches 3/4 of the critical mass.
   */
  double step_floor() const;
};

/// Raised by step() when dt exceeds the transport limit.
class CflViolation : public std::runtime_error {
 public:
  CflViolation(double dt, double limit);
  double limit() const { return limit_; }

 private:
  double limit_;
};

/// Transport accuracy limit cfl * h / |c| over nodes, h the upwind cell.
/// Infinite for the linear profile.
double max_stable_dt(const MassProfile& mass, double cfl = 1.0);

struct StepResult {
  MassProfile profile;
  double repair = 0.0;    // largest monotone/bounds correction applied
  bool flagged = false;   // repair exceeded 1e-12 m
};

/**
 * One linearly implicit step on w = M - m xi with the transport speed
 * c = w/pi frozen at the old level:
 *
 *   (I - dt (4 xi D2 + c D1)) w_new = w + dt c m
 *
 * D1 is centered at nodes where the cell Peclet number is at most 2 for every
 * admissible c, and upwind elsewhere, so the matrix is an M-matrix. Throws
 * CflViolation if dt > max_stable_dt(mass).
 */
StepResult step(const MassProfile& mass, double dt);

Diagnostics diagnose(double t, double dt, const MassProfile& mass);

/// Called after every accepted step with the new time and profile.
using StepObserver = std::function<void(double t, const MassProfile& mass)>;

/**
 * Adaptive integration to config.t_end.
 *
 * Step size is min(grow * previous, CFL limit, dt_max), shortened to land on
 * snapshot times and t_end. A step is rejected and retried at half size when
 * sup u more than doubles or the monotone repair is flagged. Snapshots are
 * taken at t = 0 and every snapshot_every.
 *
 * The run stops with a verdict when sup u passes the blowup threshold, or at
 * the step floor: halving drove dt below step_floor(), or the speed at one of
 * the two innermost nodes exceeds cfl * (xi_2 - xi_1) / step_floor(). A floor
 * stop whose interior density peak sits at node 1 counts as blowup.
 */
SimulationTrace simulate(const SchemeConfig& config, const MassProfile& initial,
                         const StepObserver& observer = {});

/// Threshold test on one state; the step-floor trigger is raised by simulate.
std::optional<BlowupReport> detect_blowup(double t, const MassProfile& mass,
                                          const SchemeConfig& config);

/// Node in [1, N-1] where the reconstructed density is largest.
std::size_t interior_peak(const MassProfile& mass);

struct ComparisonReport {
  double max_violation = 0.0;  // max over steps and nodes of (lower - upper)+
  double violation_time = 0.0;
  std::size_t violation_node = 0;
  std::size_t steps = 0;
  MassProfile lower;
  MassProfile upper;
};

/// Co-evolves an ordered pair with identical steps up to t_end.
/// Throws NodeError if lower0 > upper0 somewhere (beyond 1e-12 m).
ComparisonReport verify_discrete_comparison(const MassProfile& lower0,
                                            const MassProfile& upper0, double t_end,
                                            const SchemeConfig& config);

/// sup over the trace of (sup M/xi + m) / (2 pi), a bound on |v_r|.
double bound_gradient_v(const SimulationTrace& trace);

}  // namespace critmass
