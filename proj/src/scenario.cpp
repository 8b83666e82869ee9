#include "critmass/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <thread>

#include "critmass/barriers.hpp"
#include "critmass/constants.hpp"

namespace critmass {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string yes_no(bool pass) { return pass ? "pass" : "fail"; }

void add(Summary& s, std::string key, std::string value) {
  s.emplace_back(std::move(key), std::move(value));
}

void add(Summary& s, std::string key, double value) {
  s.emplace_back(std::move(key), format_number(value));
}

double final_sup_distance(const SimulationTrace& trace) {
  const MassProfile& last = trace.final_profile ? *trace.final_profile : trace.snapshots.back().profile;
  const RadialField u = density_from_mass(last);
  const double mean = last.total_mass() / kPi;
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(u[i] - mean));
  return worst / mean;
}

double max_sup_u(const SimulationTrace& trace) {
  double worst = 0.0;
  for (const Diagnostics& d : trace.rows) worst = std::max(worst, d.sup_u);
  return worst;
}

}  // namespace

std::string mass_label(double mass) {
  const double ratio = mass / kPi;
  const double whole = std::round(ratio);
  if (whole >= 1.0 && std::abs(ratio - whole) <= 1e-12 * ratio) {
    return std::to_string(static_cast<long long>(whole)) + "pi";
  }
  return format_number(mass);
}

std::optional<Verdict> expected_verdict(double mass) {
  if (mass <= kCriticalMass * (1.0 + 1e-12)) return Verdict::completed;
  return std::nullopt;
}

SimulationOutcome run_simulation(const ExperimentConfig& config, const StepObserver& observer) {
  const GridPtr grid = config.make_grid();
  SimulationOutcome out;
  out.trace = simulate(config.scheme_config(grid), config.initial_profile(grid), observer);
  out.decay = audit_decay(out.trace);
  out.convergence = longtime_convergence(out.trace);
  return out;
}

void write_simulation_files(const fs::path& dir, const SimulationOutcome& outcome) {
  fs::create_directories(dir);
  {
    std::ofstream out = open_output(dir / "trace.csv");
    write_trace_csv(out, outcome.trace.rows);
  }
  for (std::size_t k = 0; k < outcome.trace.snapshots.size(); ++k) {
    std::ofstream out = open_output(dir / ("snap_" + std::to_string(k) + ".csv"));
    write_snapshot_csv(out, outcome.trace.snapshots[k].profile);
  }
  std::ofstream out = open_output(dir / "energy_audit.csv");
  write_energy_audit_csv(out, energy_audit_rows(outcome.trace.times(), outcome.trace.energies(),
                                                outcome.trace.dissipations()));
}

Summary simulation_summary(const ExperimentConfig& config, const SimulationOutcome& outcome) {
  const SimulationTrace& trace = outcome.trace;
  Summary s;
  add(s, "mass", config.mass);
  add(s, "grid_n", std::to_string(config.grid.intervals));
  add(s, "grid_gamma", config.grid.gamma);
  add(s, "initial", std::string(to_string(config.initial.kind)));
  add(s, "initial_parameter", config.initial.parameter);
  add(s, "verdict", std::string(to_string(trace.verdict)));
  add(s, "t_final", trace.rows.back().t);
  add(s, "steps", std::to_string(trace.rows.size() - 1));
  add(s, "rejected_steps", std::to_string(trace.rejected_steps));
  add(s, "sup_u_max", max_sup_u(trace));
  add(s, "final_sup_distance", final_sup_distance(trace));
  if (!outcome.convergence.points.empty()) {
    add(s, "final_potential_sup", outcome.convergence.points.back().potential_sup);
  }
  if (outcome.convergence.decay_rate) add(s, "decay_rate", *outcome.convergence.decay_rate);
  add(s, "energy_initial", trace.rows.front().energy);
  add(s, "energy_final", trace.rows.back().energy);
  add(s, "energy_max_increase_relative", outcome.decay.max_increase_relative);
  add(s, "energy_budget_residual", outcome.decay.budget_relative);
  if (trace.blowup) {
    const BlowupReport& b = *trace.blowup;
    add(s, "blowup_trigger",
        b.trigger == BlowupReport::Trigger::threshold ? "threshold" : "step_floor");
    add(s, "blowup_time", b.time);
    add(s, "blowup_node", std::to_string(b.node));
    add(s, "blowup_xi", b.xi_peak);
    add(s, "blowup_sup_u", b.sup_u);
  }
  return s;
}

void write_summary_file(const fs::path& dir, const Summary& summary) {
  fs::create_directories(dir);
  std::ofstream out = open_output(dir / "summary.txt");
  write_summary(out, summary);
}

GlobalReport verify_global(const ExperimentConfig& config) {
  const double m = config.mass;
  const double first_snapshot = std::min(config.output.snapshot_every, config.scheme.t_end);
  ConfinementReport conf;
  conf.barrier_time = first_snapshot;
  std::optional<SuperBarrier> barrier;
  bool attempted = false;

  auto observer = [&](double t, const MassProfile& mass) {
    if (t < first_snapshot * (1.0 - 1e-12)) return;
    if (!attempted) {
      attempted = true;
      try {
        barrier = find_dominating_super(mass);
        conf.barrier_a = barrier->parameter();
        conf.ratio_bound = barrier->ratio_bound();
      } catch (const std::exception& e) {
        conf.barrier_error = e.what();
      }
    }
    if (!barrier) return;
    const Grid& grid = mass.grid();
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
      conf.max_excess = std::max(conf.max_excess, mass[i] - barrier->value(grid[i]));
    }
    conf.max_ratio = std::max(conf.max_ratio, mass.sup_ratio());
  };

  GlobalReport report;
  report.outcome = run_simulation(config, observer);
  if (!attempted && conf.barrier_error.empty()) {
    conf.barrier_error = "run stopped before the first snapshot";
  }
  conf.confined = barrier.has_value() && conf.max_excess <= 1e-10 * m &&
                  conf.max_ratio <= conf.ratio_bound * (1.0 + 1e-12);
  report.confinement = conf;
  report.gradient_bound = bound_gradient_v(report.outcome.trace);
  return report;
}

namespace {

ScenarioResult scenario_verify_global(const ExperimentConfig& config) {
  const GlobalReport report = verify_global(config);
  const fs::path dir = config.output.dir;
  write_simulation_files(dir, report.outcome);

  ScenarioResult r;
  r.summary = simulation_summary(config, report.outcome);
  const ConfinementReport& c = report.confinement;
  add(r.summary, "barrier_time", c.barrier_time);
  if (c.barrier_a) {
    add(r.summary, "barrier_a", *c.barrier_a);
    add(r.summary, "barrier_ratio_bound", c.ratio_bound);
    add(r.summary, "barrier_max_excess", c.max_excess);
    add(r.summary, "sup_ratio_after_barrier", c.max_ratio);
  } else {
    add(r.summary, "barrier_a", "none");
    add(r.summary, "barrier_error", c.barrier_error);
  }
  add(r.summary, "gradient_bound", report.gradient_bound);

  const std::optional<Verdict> expected = expected_verdict(config.mass);
  if (expected) {
    add(r.summary, "expected_verdict", std::string(to_string(*expected)));
    add(r.summary, "barrier_confinement", yes_no(c.confined));
    if (report.outcome.trace.verdict != *expected) r.failures.push_back("verdict");
    if (!c.confined) r.failures.push_back("barrier_confinement");
  } else {
    add(r.summary, "expected_verdict", "none");
    add(r.summary, "barrier_confinement", "n/a");
  }
  write_summary_file(dir, r.summary);
  return r;
}

ScenarioResult scenario_dichotomy(const ExperimentConfig& config) {
  ScenarioResult r;
  const fs::path dir = config.output.dir;
  const std::pair<const char*, double> pair[] = {{"critical", kCriticalMass},
                                                 {"supercritical", 10.0 * kPi}};
  const Verdict expected[] = {Verdict::completed, Verdict::blowup_detected};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& [name, m] = pair[k];
    ExperimentConfig run = config.with_mass(m);
    run.output.dir = (dir / name).string();
    const SimulationOutcome outcome = run_simulation(run);
    write_simulation_files(run.output.dir, outcome);
    write_summary_file(run.output.dir, simulation_summary(run, outcome));
    const std::string prefix = std::string(name) + ".";
    add(r.summary, prefix + "mass", m);
    add(r.summary, prefix + "verdict", std::string(to_string(outcome.trace.verdict)));
    add(r.summary, prefix + "expected_verdict", std::string(to_string(expected[k])));
    add(r.summary, prefix + "t_final", outcome.trace.rows.back().t);
    add(r.summary, prefix + "sup_u_max", max_sup_u(outcome.trace));
    if (outcome.trace.blowup) {
      add(r.summary, prefix + "blowup_time", outcome.trace.blowup->time);
      add(r.summary, prefix + "blowup_node", std::to_string(outcome.trace.blowup->node));
    }
    if (outcome.trace.verdict != expected[k]) r.failures.push_back(prefix + "verdict");
  }
  add(r.summary, "dichotomy", yes_no(r.failures.empty()));
  write_summary_file(dir, r.summary);
  return r;
}

struct SteadyCheck {
  std::size_t converged = 0;
  std::size_t probes = 0;
  double max_distance = 0.0;
  std::optional<SweepReport> sweep;
};

SteadyCheck steady_probes(double m, GridPtr grid, const fs::path& dir) {
  SteadyCheck check;
  std::ofstream newton = open_output(dir / ("newton_" + mass_label(m) + ".csv"));
  newton << "init,iteration,residual,distance\n";
  // The sweep starts from the converged probe farthest from m xi.
  std::optional<MassProfile> solution;
  double solution_distance = -1.0;
  for (const NamedProfile& init : newton_initializations(m, grid)) {
    const NewtonResult result = solve_stationary_newton(init.profile);
    ++check.probes;
    for (const NewtonIterate& it : result.history) {
      newton << init.name << ',' << it.iteration << ',' << format_number(it.residual) << ','
             << format_number(it.distance) << '\n';
    }
    check.max_distance = std::max(check.max_distance, result.distance);
    if (result.converged) {
      ++check.converged;
      if (result.profile && result.distance > solution_distance) {
        solution = result.profile;
        solution_distance = result.distance;
      }
    }
  }
  if (solution && m <= kCriticalMass * (1.0 + 1e-12)) {
    check.sweep = uniqueness_sweep(*solution);
    std::ofstream sweep = open_output(dir / ("sweep_" + mass_label(m) + ".csv"));
    write_sweep_samples_csv(sweep, *check.sweep);
  }
  return check;
}

// Appends per-mass lines; failures only for masses where uniqueness is claimed.
void report_steady(ScenarioResult& r, double m, const SteadyCheck& c) {
  const std::string prefix = mass_label(m) + ".";
  const bool claimed = m <= kCriticalMass * (1.0 + 1e-12);
  add(r.summary, prefix + "newton_converged",
      std::to_string(c.converged) + "/" + std::to_string(c.probes));
  add(r.summary, prefix + "newton_max_distance", c.max_distance);
  if (c.sweep) {
    add(r.summary, prefix + "sweep_sandwiched", yes_no(c.sweep->sandwiched));
    add(r.summary, prefix + "sweep_final_gap", c.sweep->final_gap);
    add(r.summary, prefix + "sweep_envelope_gap", c.sweep->envelope_gap);
    add(r.summary, prefix + "sweep_fully_bridged", c.sweep->fully_bridged ? "yes" : "no");
  }
  if (!claimed) {
    add(r.summary, prefix + "uniqueness", "exploratory");
    return;
  }
  const bool pass = c.converged == c.probes && c.max_distance < 1e-8 * m && c.sweep &&
                    c.sweep->sandwiched && c.sweep->final_gap < 1e-8 * m;
  add(r.summary, prefix + "uniqueness", yes_no(pass));
  if (!pass) r.failures.push_back(prefix + "uniqueness");
}

ScenarioResult scenario_uniqueness(const ExperimentConfig& config) {
  ScenarioResult r;
  const fs::path dir = config.output.dir;
  fs::create_directories(dir);
  const GridPtr grid = config.make_grid();
  for (double k : {1.0, 2.0, 4.0, 8.0}) {
    const double m = k * kPi;
    report_steady(r, m, steady_probes(m, grid, dir));
  }
  write_summary_file(dir, r.summary);
  return r;
}

}  // namespace

ScenarioResult run_steady(const ExperimentConfig& config) {
  ScenarioResult r;
  const fs::path dir = config.output.dir;
  fs::create_directories(dir);
  report_steady(r, config.mass, steady_probes(config.mass, config.make_grid(), dir));
  write_summary_file(dir, r.summary);
  return r;
}

namespace {

// Two random profiles of equal mass, ordered by taking the nodewise min and max.
std::pair<MassProfile, MassProfile> random_ordered_pair(GridPtr grid, double m,
                                                        std::uint64_t seed) {
  const std::vector<RadialField> u = random_radial_profiles(grid, 2, seed, kCriticalMass);
  std::vector<double> a(grid->size());
  std::vector<double> b(grid->size());
  const MassProfile ma = mass_from_density(u[0]);
  const MassProfile mb = mass_from_density(u[1]);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = ma[i] * m / ma.total_mass();
    const double y = mb[i] * m / mb.total_mass();
    a[i] = std::min(x, y);
    b[i] = std::max(x, y);
  }
  a.back() = b.back() = m;
  return {MassProfile(grid, std::move(a), m), MassProfile(grid, std::move(b), m)};
}

}  // namespace

ScenarioResult run_checks(std::uint64_t seed) {
  ScenarioResult r;
  auto record = [&](const std::string& name, bool pass, const std::string& detail) {
    add(r.summary, "check." + name, yes_no(pass));
    if (!detail.empty()) add(r.summary, "check." + name + ".detail", detail);
    if (!pass) r.failures.push_back(name);
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      record(name, false, e.what());
    }
  };

  guarded("barrier_residuals", [&] {
    const std::vector<double> as = log_space(1e-3, 1e3, 10);
    const std::vector<double> ms = {kPi / 4.0, kPi, 4.0 * kPi, kCriticalMass};
    std::vector<double> xis;
    for (int k = 1; k <= 20; ++k) xis.push_back(k / 21.0);
    double worst = 0.0;
    bool signs = true;
    for (BarrierFamily f : {BarrierFamily::super, BarrierFamily::sub}) {
      for (const ResidualAuditRow& row : residual_audit(f, as, ms, xis)) {
        signs = signs && (f == BarrierFamily::super ? row.closed_form > 0.0 : row.closed_form < 0.0);
        worst = std::max(worst, row.abs_error / std::abs(row.closed_form));
      }
    }
    record("barrier_residuals", signs && worst <= 1e-6, "max_rel_fd_error=" + format_number(worst));
  });

  guarded("supercritical_sign_flip", [&] {
    const double m = 10.0 * kPi;
    const bool pass = residual_super_closed_form(1.0, m, 0.199) < 0.0 &&
                      residual_super_closed_form(1.0, m, 0.201) > 0.0;
    record("supercritical_sign_flip", pass, "");
  });

  guarded("discrete_comparison", [&] {
    const GridPtr grid = Grid::graded(128, 1.0);
    SchemeConfig scheme;
    scheme.grid = grid;
    scheme.t_end = 0.2;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 3; ++k) {
      const double m = kCriticalMass * (0.25 + 0.25 * static_cast<double>(k));
      auto [lo, hi] = random_ordered_pair(grid, m, seed + k);
      const ComparisonReport c = verify_discrete_comparison(lo, hi, 0.2, scheme);
      worst = std::max(worst, c.max_violation / m);
    }
    record("discrete_comparison", worst <= 1e-10, "max_violation_over_m=" + format_number(worst));
  });

  guarded("second_moment", [&] {
    const GridPtr grid = Grid::graded(512, 1.0);
    bool pass = true;
    for (const RadialField& u : random_radial_profiles(grid, 5, seed, kCriticalMass)) {
      const MassProfile mass = mass_from_density(u);
      const Integral a = second_moment(mass);
      const Integral b = density_second_moment(u);
      pass = pass && std::abs(a.value - b.value) <= 10.0 * (a.error_estimate + b.error_estimate);
    }
    record("second_moment", pass, "");
  });

  guarded("loghls", [&] {
    const GridPtr grid = Grid::graded(1024, 1.0);
    double worst = std::numeric_limits<double>::infinity();
    for (const RadialField& u : random_radial_profiles(grid, 10, seed, kCriticalMass)) {
      worst = std::min(worst, loghls_margin(u));
    }
    record("loghls", worst >= -1e-6, "min_margin=" + format_number(worst));
  });

  guarded("energy_decay", [&] {
    const GridPtr grid = Grid::graded(256, 2.0);
    SchemeConfig scheme;
    scheme.grid = grid;
    scheme.t_end = 1.0;
    scheme.snapshot_every = 0.5;
    const SimulationTrace trace =
        simulate(scheme, preset_profile(PresetKind::pks, 0.2, kCriticalMass, grid));
    const DecayReport d = audit_decay(trace);
    const bool pass = trace.verdict == Verdict::completed && d.max_increase_relative <= 1e-6 &&
                      d.budget_relative <= 0.02;
    record("energy_decay", pass, "budget_relative=" + format_number(d.budget_relative));
  });

  guarded("stationary_uniqueness", [&] {
    const GridPtr grid = Grid::graded(256, 2.0);
    const double m = 2.0 * kPi;
    bool pass = true;
    std::optional<MassProfile> solution;
    for (const NamedProfile& init : newton_initializations(m, grid)) {
      const NewtonResult res = solve_stationary_newton(init.profile);
      pass = pass && res.converged && res.distance < 1e-8 * m;
      if (res.profile && !solution) solution = res.profile;
    }
    if (solution) {
      const SweepReport s = uniqueness_sweep(*solution);
      pass = pass && s.sandwiched && s.final_gap < 1e-8 * m;
    }
    record("stationary_uniqueness", pass && solution.has_value(), "");
  });

  guarded("supercritical_blowup", [&] {
    const GridPtr grid = Grid::graded(256, 2.0);
    SchemeConfig scheme;
    scheme.grid = grid;
    scheme.t_end = 1.0;
    const SimulationTrace trace =
        simulate(scheme, preset_profile(PresetKind::barrier, 0.01, 10.0 * kPi, grid));
    const bool pass = trace.verdict == Verdict::blowup_detected && trace.blowup &&
                      trace.blowup->node == 1;
    record("supercritical_blowup", pass, "verdict=" + std::string(to_string(trace.verdict)));
  });

  guarded("config_validation", [&] {
    const ExperimentConfig c =
        parse_config_text(R"({"mass": 25.1327412287, "initial.kind": "constant"})");
    bool pass = c.grid.intervals == 512 && c.grid.gamma == 1.0 && c.scheme.t_end == 10.0;
    auto rejects = [](const char* text) {
      try {
        parse_config_text(text);
      } catch (const ConfigError&) {
        return true;
      }
      return false;
    };
    pass = pass && rejects(R"({"mass": 0})") && rejects(R"({"initial.kind": "constant"})") &&
           rejects(R"({"mass": "8pi", "colour": 1})");
    record("config_validation", pass, "");
  });

  add(r.summary, "checks_failed", std::to_string(r.failures.size()));
  return r;
}

ScenarioResult run_scenario(std::string_view name, const ExperimentConfig& config) {
  if (name == "verify-global") return scenario_verify_global(config);
  if (name == "dichotomy") return scenario_dichotomy(config);
  if (name == "uniqueness") return scenario_uniqueness(config);
  if (name == "check") {
    ScenarioResult r = run_checks(config.seed);
    write_summary_file(config.output.dir, r.summary);
    return r;
  }
  throw UnknownScenario("unknown scenario '" + std::string(name) +
                        "' (expected verify-global, dichotomy, uniqueness or check)");
}

namespace {

double axis_parameter(const nlohmann::json& value) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_number_token(value.get<std::string>());
  throw ConfigError("axis values must be numbers or numeric strings");
}

SweepRow sweep_child(const nlohmann::json& flat, const std::string& axis,
                     const nlohmann::json& value, const fs::path& dir) {
  SweepRow row;
  row.value = value.is_string() ? value.get<std::string>() : value.dump();
  row.parameter = std::numeric_limits<double>::quiet_NaN();
  try {
    row.parameter = axis_parameter(value);
    nlohmann::json doc = flat;
    doc[axis] = value;
    doc["output.dir"] = dir.string();
    const ExperimentConfig config = parse_config(doc);
    const SimulationOutcome outcome = run_simulation(config);
    write_simulation_files(dir, outcome);
    write_summary_file(dir, simulation_summary(config, outcome));
    row.ok = true;
    row.verdict = std::string(to_string(outcome.trace.verdict));
    row.t_final = outcome.trace.rows.back().t;
    if (outcome.trace.blowup) row.blowup_time = outcome.trace.blowup->time;
    row.sup_u_max = max_sup_u(outcome.trace);
    row.final_sup_distance = final_sup_distance(outcome.trace);
    row.energy_budget_relative = outcome.decay.budget_relative;
  } catch (const std::exception& e) {
    row.ok = false;
    row.verdict = "error";
    row.error = e.what();
  }
  return row;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::vector<SweepRow> run_sweep(const nlohmann::json& base, const std::string& axis,
                                const std::vector<nlohmann::json>& values, const fs::path& dir,
                                std::size_t workers) {
  nlohmann::json flat = flatten_document(base);
  flat.erase("output.dir");
  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < values.size(); k = next++) {
      rows[k] = sweep_child(flat, axis, values[k], dir / ("run_" + std::to_string(k)));
    }
  };
  const std::size_t count = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(values.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < count; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (std::isnan(a.parameter)) return false;
    if (std::isnan(b.parameter)) return true;
    return a.parameter < b.parameter;
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "value,parameter,status,verdict,t_final,blowup_time,sup_u_max,final_sup_distance,"
         "energy_budget_residual,error\n";
  for (const SweepRow& r : rows) {
    out << csv_field(r.value) << ',' << format_number(r.parameter) << ','
        << (r.ok ? "ok" : "error") << ',' << r.verdict << ',';
    if (r.ok) {
      out << format_number(r.t_final) << ','
          << (r.blowup_time ? format_number(*r.blowup_time) : std::string()) << ','
          << format_number(r.sup_u_max) << ',' << format_number(r.final_sup_distance) << ','
          << format_number(r.energy_budget_relative);
    } else {
      out << ",,,,";
    }
    out << ',' << csv_field(r.error) << '\n';
  }
}

}  // namespace critmass
