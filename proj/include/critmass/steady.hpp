#pragma once

#include <optional>
#include <string>
#include <vector>

#include "critmass/barriers.hpp"
#include "critmass/radial.hpp"
#include "critmass/trace.hpp"

namespace critmass {

/// Q applied at every interior node with the centered stencils.
std::vector<OperatorResidual> stationary_residual(const MassProfile& profile);

struct NewtonIterate {
  std::size_t iteration = 0;
  double residual = 0.0;  // max-norm of Q
  double distance = 0.0;  // max |W - m xi|
};

struct NewtonResult {
  std::vector<double> values;          // last iterate, M at every node
  std::optional<MassProfile> profile;  // set when the iterate is a valid profile
  std::vector<NewtonIterate> history;  // entry 0 is the initial guess
  std::size_t iterations = 0;       // accepted Newton steps
  std::size_t transient_steps = 0;  // pseudo-transient steps taken after a stall
  bool converged = false;
  double final_residual = 0.0;
  double distance = 0.0;
};

struct NewtonOptions {
  std::size_t max_iterations = 100;
  double tolerance = 1e-10;  // relative to m
  std::size_t max_halvings = 40;
  // When no damped step reduces the residual (or progress stalls), implicit pseudo-time steps of
  // length transient_dt0, growing geometrically, move the iterate along the
  // parabolic flow until tau exceeds transient_switch; Newton then resumes.
  double stall_step = 1.0 / 64.0;  // damping below this counts as a stall
  double stall_ratio = 0.99;       // so does a residual reduction above this
  std::size_t max_transient_steps = 400;
  double transient_dt0 = 1e-4;
  double transient_growth = 1.1;
  double transient_switch = 1.0;
};

/**
 * Damped Newton on the discrete stationary problem with pinned endpoints.
 *
 * Works on the deviation W - m xi with a tridiagonal Jacobian. Each step is
 * halved until the residual max-norm decreases, and iterates are clipped to
 * [0, m]. Non-convergence is reported in the result, not thrown.
 */
NewtonResult solve_stationary_newton(const MassProfile& init, const NewtonOptions& options = {});

/// A labelled starting profile for Newton probes.
struct NamedProfile {
  std::string name;
  MassProfile profile;
};

/// Ten varied initializations of mass m: the line, PKS cores, concave and
/// convex barrier shapes and power profiles.
std::vector<NamedProfile> newton_initializations(double mass, GridPtr grid);

/// One sampled family member in a uniqueness sweep.
struct SweepSample {
  double parameter = 0.0;
  bool ordered = false;
  std::optional<std::size_t> violation_node;
  double margin = 0.0;   // separation margin when ordered, else NaN
  bool bridged = false;  // margin covers the step to the next sample
};

struct SweepReport {
  double mass = 0.0;
  double derivative_bound = 0.0;
  std::vector<SweepSample> super_samples;  // W <= W_a, a increasing
  std::vector<SweepSample> sub_samples;    // W >= W_b, b increasing
  bool sandwiched = false;
  std::optional<double> violating_super;  // first parameter that fails
  std::optional<double> violating_sub;
  std::size_t violating_node = 0;
  double final_gap = 0.0;     // max |W - m xi|
  double envelope_gap = 0.0;  // max distance of the extreme samples from m xi
  bool fully_bridged = false;
};

struct SweepOptions {
  std::size_t samples = 50;
  double parameter_max = 1e3;
  double tolerance = 1e-12;  // ordering slack relative to m
};

/**
 * Sweeps the concave family from the envelope seed up to parameter_max and
 * the convex family likewise, recording nodewise ordering and separation
 * margins on a log grid.
 *
 * A sample is bridged when its margin exceeds m (1/p_k - 1/p_{k+1}), which
 * bounds how far the family moves before the next sample.
 */
SweepReport uniqueness_sweep(const MassProfile& profile, const SweepOptions& options = {});

struct ConvergencePoint {
  double t = 0.0;
  double sup_distance = 0.0;  // max |u - m/pi|
  double potential_sup = 0.0; // max |v|
};

struct ConvergenceReport {
  std::vector<ConvergencePoint> points;
  std::optional<double> decay_rate;  // least squares fit of ln(sup_distance) vs t
  double final_relative = 0.0;       // last sup_distance / (m/pi)
};

/// Distance to the constant state at every snapshot of a completed trace.
ConvergenceReport longtime_convergence(const SimulationTrace& trace);

}  // namespace critmass
