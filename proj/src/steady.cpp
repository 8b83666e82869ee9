#include "critmass/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "critmass/constants.hpp"
#include "critmass/stencil.hpp"

namespace critmass {

namespace {

// Residual of the discrete stationary problem in deviation form; entries 0
// and N stay zero.
std::vector<double> residual_of(const Grid& grid, std::span<const double> w, double m) {
  const std::size_t n = grid.size();
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const StencilWeights d1 = first_derivative_weights(grid, i);
    const StencilWeights d2 = second_derivative_weights(grid, i);
    const double slope = m + d1.left * w[i - 1] + d1.center * w[i] + d1.right * w[i + 1];
    const double curvature = d2.left * w[i - 1] + d2.center * w[i] + d2.right * w[i + 1];
    r[i] = -4.0 * grid[i] * curvature - w[i] * slope / kPi;
  }
  return r;
}

double max_abs(std::span<const double> v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

// Solves J x = rhs for tridiagonal J given by (lower, diag, upper).
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double f = lower[i] / diag[i - 1];
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  return rhs;
}

}  // namespace

std::vector<OperatorResidual> stationary_residual(const MassProfile& profile) {
  const Grid& grid = profile.grid();
  const std::vector<double> r = residual_of(grid, profile.deviation(), profile.total_mass());
  std::vector<OperatorResidual> out;
  out.reserve(grid.size() - 2);
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) out.push_back({grid[i], r[i]});
  return out;
}

NewtonResult solve_stationary_newton(const MassProfile& init, const NewtonOptions& options) {
  const Grid& grid = init.grid();
  const double m = init.total_mass();
  const std::size_t n = grid.size();
  const double tolerance = options.tolerance * m;

  std::vector<double> w = init.deviation();
  auto clip = [&](std::vector<double>& x) {
    for (std::size_t i = 1; i + 1 < n; ++i) x[i] = std::clamp(x[i], -m * grid[i], m * (1.0 - grid[i]));
  };
  clip(w);
  std::vector<double> r = residual_of(grid, w, m);
  double norm = max_abs(r);

  NewtonResult result;
  result.history.push_back({0, norm, max_abs(w)});
  std::size_t iteration = 0;
  // 1/tau shifts the Jacobian diagonal (pseudo-transient continuation);
  // tau = infinity is a plain Newton step.
  double tau = std::numeric_limits<double>::infinity();
  std::size_t transient_steps = 0;
  while (norm >= tolerance && iteration < options.max_iterations) {
    const std::size_t k = n - 2;
    std::vector<double> lower(k, 0.0), diag(k), upper(k, 0.0), rhs(k);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const StencilWeights d1 = first_derivative_weights(grid, i);
      const StencilWeights d2 = second_derivative_weights(grid, i);
      const double slope = m + d1.left * w[i - 1] + d1.center * w[i] + d1.right * w[i + 1];
      const double xi4 = 4.0 * grid[i];
      lower[i - 1] = -xi4 * d2.left - w[i] * d1.left / kPi;
      diag[i - 1] = 1.0 / tau - xi4 * d2.center - (slope + w[i] * d1.center) / kPi;
      upper[i - 1] = -xi4 * d2.right - w[i] * d1.right / kPi;
      rhs[i - 1] = -r[i];
    }
    const std::vector<double> delta = solve_tridiagonal(lower, diag, upper, rhs);

    const double previous = norm;
    double lambda = 1.0;
    bool accepted = false;
    for (std::size_t h = 0; h <= options.max_halvings; ++h, lambda *= 0.5) {
      std::vector<double> trial = w;
      for (std::size_t i = 1; i + 1 < n; ++i) trial[i] += lambda * delta[i - 1];
      clip(trial);
      std::vector<double> trial_r = residual_of(grid, trial, m);
      const double trial_norm = max_abs(trial_r);
      const bool transient = std::isfinite(tau);
      if (std::isfinite(trial_norm) && (trial_norm < norm || (transient && h == 0))) {
        w = std::move(trial);
        r = std::move(trial_r);
        norm = trial_norm;
        accepted = true;
        break;
      }
      if (transient) break;
    }
    if (std::isfinite(tau)) {
      if (!accepted) break;
      ++transient_steps;
      tau *= options.transient_growth;
      if (transient_steps >= options.max_transient_steps) break;
      if (tau > options.transient_switch) tau = std::numeric_limits<double>::infinity();
      continue;
    }
    if (!accepted) {
      if (options.max_transient_steps == 0 || transient_steps >= options.max_transient_steps) break;
      tau = options.transient_dt0;
      continue;
    }
    ++iteration;
    result.history.push_back({iteration, norm, max_abs(w)});
    // heavy damping or negligible progress marks a stall as well
    const bool stalled = lambda < options.stall_step || norm > options.stall_ratio * previous;
    if (stalled && transient_steps < options.max_transient_steps) tau = options.transient_dt0;
  }
  result.transient_steps = transient_steps;

  result.iterations = result.history.back().iteration;
  result.converged = norm < tolerance;
  result.final_residual = norm;
  result.distance = max_abs(w);
  result.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.values[i] = m * grid[i] + w[i];
  result.values.front() = 0.0;
  result.values.back() = m;
  try {
    result.profile.emplace(init.grid_ptr(), result.values, m);
  } catch (const std::domain_error&) {
    // a non-monotone iterate is reported through values only
  }
  return result;
}

std::vector<NamedProfile> newton_initializations(double mass, GridPtr grid) {
  const Grid& g = *grid;
  auto from = [&](auto&& f) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g[i]);
    v.front() = 0.0;
    v.back() = mass;
    return MassProfile(grid, std::move(v), mass);
  };
  auto convex = [&](double b) {
    return from([=](double xi) { return mass * b * xi / (b + 1.0 - xi); });
  };
  std::vector<NamedProfile> out;
  out.push_back({"line", MassProfile::linear(grid, mass)});
  for (const char* lambda : {"0.05", "0.2", "1"}) {
    out.push_back({std::string("pks_") + lambda,
                   preset_profile(PresetKind::pks, std::stod(lambda), mass, grid)});
  }
  for (const char* a : {"0.1", "1"}) {
    out.push_back({std::string("barrier_") + a,
                   preset_profile(PresetKind::barrier, std::stod(a), mass, grid)});
  }
  out.push_back({"convex_0.5", convex(0.5)});
  out.push_back({"convex_2", convex(2.0)});
  out.push_back({"power_0.5", from([=](double xi) { return mass * std::sqrt(xi); })});
  out.push_back({"power_2", from([=](double xi) { return mass * xi * xi; })});
  return out;
}

namespace {

template <class Family>
std::vector<SweepSample> sweep_family(const MassProfile& profile, double seed, bool above,
                                      const SweepOptions& options, double& envelope_gap) {
  const Grid& grid = profile.grid();
  const double m = profile.total_mass();
  const double top = std::max(seed, options.parameter_max);
  const std::size_t count = seed >= top ? 1 : std::max<std::size_t>(options.samples, 2);
  std::vector<SweepSample> samples;
  samples.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double s = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    const double p = k + 1 == count ? top : seed * std::pow(top / seed, s);
    const Family family(p, m);
    const std::vector<double> barrier = family.sample(grid);
    const auto values = profile.values();
    const std::span<const double> upper = above ? std::span<const double>(barrier) : values;
    const std::span<const double> lower = above ? values : std::span<const double>(barrier);
    SweepSample sample;
    sample.parameter = p;
    sample.violation_node = ordering_violation(upper, lower, options.tolerance * m);
    sample.ordered = !sample.violation_node.has_value();
    sample.margin = sample.ordered ? separation_margin(grid, upper, lower)
                                   : std::numeric_limits<double>::quiet_NaN();
    samples.push_back(sample);
  }
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const double step = m * (1.0 / samples[k].parameter - 1.0 / samples[k + 1].parameter);
    samples[k].bridged = samples[k].ordered && samples[k].margin >= step;
  }
  if (!samples.empty()) samples.back().bridged = samples.back().ordered;
  const Family extreme(samples.back().parameter, m);
  envelope_gap = std::max(envelope_gap, max_abs(extreme.sample_deviation(grid)));
  return samples;
}

}  // namespace

SweepReport uniqueness_sweep(const MassProfile& profile, const SweepOptions& options) {
  SweepReport report;
  report.mass = profile.total_mass();
  report.derivative_bound = default_derivative_bound(profile);
  const double a0 = find_dominating_super(profile, report.derivative_bound).parameter();
  const double b0 = find_dominated_sub(profile, report.derivative_bound).parameter();

  report.super_samples = sweep_family<SuperBarrier>(profile, a0, true, options, report.envelope_gap);
  report.sub_samples = sweep_family<SubBarrier>(profile, b0, false, options, report.envelope_gap);

  auto first_violation = [](const std::vector<SweepSample>& samples) -> const SweepSample* {
    for (const SweepSample& s : samples) {
      if (!s.ordered) return &s;
    }
    return nullptr;
  };
  if (const SweepSample* s = first_violation(report.super_samples)) {
    report.violating_super = s->parameter;
    report.violating_node = *s->violation_node;
  }
  if (const SweepSample* s = first_violation(report.sub_samples)) {
    report.violating_sub = s->parameter;
    if (!report.violating_super) report.violating_node = *s->violation_node;
  }
  report.sandwiched = !report.violating_super && !report.violating_sub;
  auto all_bridged = [](const std::vector<SweepSample>& samples) {
    return std::all_of(samples.begin(), samples.end(), [](const SweepSample& s) { return s.bridged; });
  };
  report.fully_bridged = all_bridged(report.super_samples) && all_bridged(report.sub_samples);
  report.final_gap = max_abs(profile.deviation());
  return report;
}

ConvergenceReport longtime_convergence(const SimulationTrace& trace) {
  ConvergenceReport report;
  const double m = trace.mass;
  const double level = m / kPi;
  for (const Snapshot& snap : trace.snapshots) {
    const RadialField u = density_from_mass(snap.profile);
    const RadialField v = potential_from_mass(snap.profile);
    double dist = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) dist = std::max(dist, std::abs(u[i] - level));
    report.points.push_back({snap.t, dist, max_abs(v.values())});
  }
  if (!report.points.empty()) report.final_relative = report.points.back().sup_distance / level;

  // fit only the resolved part of the decay, above the rounding floor
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t count = 0;
  for (const ConvergencePoint& p : report.points) {
    if (!(p.t > 0.0) || !(p.sup_distance > 1e-10 * level)) continue;
    const double y = std::log(p.sup_distance);
    sx += p.t;
    sy += y;
    sxx += p.t * p.t;
    sxy += p.t * y;
    ++count;
  }
  if (count >= 2) {
    const double denom = static_cast<double>(count) * sxx - sx * sx;
    if (denom > 0.0) report.decay_rate = -(static_cast<double>(count) * sxy - sx * sy) / denom;
  }
  return report;
}

}  // namespace critmass
