// Command-line front end: simulate, barrier, steady, energy-audit, sweep,
// check and scenario. Exit codes: 0 ok, 1 usage or input error, 2 a
// scientific assertion failed.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "critmass/barriers.hpp"
#include "critmass/config.hpp"
#include "critmass/constants.hpp"
#include "critmass/csv.hpp"
#include "critmass/energy.hpp"
#include "critmass/scenario.hpp"

namespace fs = std::filesystem;
using namespace critmass;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kMismatch = 2;

struct ConfigOptions {
  std::string path;
  std::vector<std::string> sets;
  std::string out;
};

void add_config_options(CLI::App* cmd, ConfigOptions& o, bool required) {
  cmd->add_option("config", o.path, "JSON experiment configuration")
      ->required(required)
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", o.sets,
                  "Override a key, e.g. --set grid.n=1024; key=null removes it (repeatable)");
  cmd->add_option("-o,--out", o.out, "Output directory (overrides output.dir)");
}

nlohmann::json override_value(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    return text;
  }
}

nlohmann::json load_document(const ConfigOptions& o) {
  nlohmann::json doc = nlohmann::json::object();
  if (!o.path.empty()) {
    std::ifstream in(o.path);
    if (!in) throw ConfigError("cannot read " + o.path);
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
  }
  doc = flatten_document(doc);
  for (const std::string& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
    const nlohmann::json value = override_value(s.substr(eq + 1));
    if (value.is_null()) {
      doc.erase(s.substr(0, eq));
    } else {
      doc[s.substr(0, eq)] = value;
    }
  }
  if (!o.out.empty()) doc["output.dir"] = o.out;
  return doc;
}

ExperimentConfig load(const ConfigOptions& o) { return parse_config(load_document(o)); }

int report(const ScenarioResult& r) {
  write_summary(std::cout, r.summary);
  for (const std::string& f : r.failures) std::cerr << "assertion failed: " << f << '\n';
  return r.failures.empty() ? kOk : kMismatch;
}

int cmd_simulate(const ConfigOptions& o, const std::string& expect) {
  const ExperimentConfig config = load(o);
  const SimulationOutcome outcome = run_simulation(config);
  write_simulation_files(config.output.dir, outcome);
  ScenarioResult r;
  r.summary = simulation_summary(config, outcome);
  if (!expect.empty()) {
    r.summary.emplace_back("expected_verdict", expect);
    if (to_string(outcome.trace.verdict) != expect) r.failures.push_back("verdict");
  }
  write_summary_file(config.output.dir, r.summary);
  return report(r);
}

struct BarrierOptions {
  std::string family = "super";
  double a_min = 1e-3;
  double a_max = 1e3;
  std::size_t a_count = 30;
  std::vector<std::string> masses;
  std::size_t xi_count = 100;
  std::string out;
};

int cmd_barrier(const BarrierOptions& o) {
  const BarrierFamily family = o.family == "sub" ? BarrierFamily::sub : BarrierFamily::super;
  const std::vector<double> params = log_space(o.a_min, o.a_max, o.a_count);
  std::vector<double> masses;
  if (o.masses.empty()) {
    for (int k = 1; k <= 8; ++k) masses.push_back(k * kPi);
  } else {
    for (const std::string& m : o.masses) masses.push_back(parse_number_token(m));
  }
  std::vector<double> xis;
  for (std::size_t k = 1; k <= o.xi_count; ++k) {
    xis.push_back(static_cast<double>(k) / static_cast<double>(o.xi_count + 1));
  }
  const std::vector<ResidualAuditRow> rows = residual_audit(family, params, masses, xis);
  if (o.out.empty()) {
    write_residual_audit_csv(std::cout, rows);
  } else {
    std::ofstream out(o.out);
    if (!out) throw std::runtime_error("cannot write " + o.out);
    write_residual_audit_csv(out, rows);
  }
  return kOk;
}

int cmd_energy_audit(const std::string& dir, const std::string& out_path) {
  std::ifstream in(fs::path(dir) / "trace.csv");
  if (!in) throw ConfigError("no trace.csv in " + dir);
  const std::vector<Diagnostics> rows = read_trace_csv(in);
  if (rows.size() < 2) throw ConfigError("trace.csv needs at least two rows");
  std::vector<double> t, f, d;
  for (const Diagnostics& r : rows) {
    t.push_back(r.t);
    f.push_back(r.energy);
    d.push_back(r.dissipation);
  }
  const fs::path target = out_path.empty() ? fs::path(dir) / "energy_audit.csv" : fs::path(out_path);
  std::ofstream out(target);
  if (!out) throw std::runtime_error("cannot write " + target.string());
  write_energy_audit_csv(out, energy_audit_rows(t, f, d));
  const DecayReport decay = audit_decay(t, f, d);
  Summary s = {{"energy_drop", format_number(decay.energy_drop)},
               {"dissipated", format_number(decay.dissipated)},
               {"energy_budget_residual", format_number(decay.budget_relative)},
               {"energy_max_increase_relative", format_number(decay.max_increase_relative)}};
  write_summary(std::cout, s);
  return kOk;
}

int cmd_sweep(const ConfigOptions& o, const std::string& axis, const std::vector<std::string>& values,
              std::size_t workers) {
  nlohmann::json doc = load_document(o);
  const std::string dir = doc.contains("output.dir") ? doc["output.dir"].get<std::string>() : "out";
  parse_config(doc);  // validate the template before launching anything
  std::vector<nlohmann::json> axis_values;
  for (const std::string& v : values) axis_values.push_back(override_value(v));
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  const std::vector<SweepRow> rows = run_sweep(doc, axis, axis_values, dir, workers);
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / "sweep.csv");
  if (!out) throw std::runtime_error("cannot write sweep.csv");
  write_sweep_csv(out, rows);
  write_sweep_csv(std::cout, rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial critical-mass chemotaxis solver"};
  app.require_subcommand(1);

  ConfigOptions sim_opts;
  std::string expect;
  auto* sim = app.add_subcommand("simulate", "Run one simulation and write trace, snapshots, summary");
  add_config_options(sim, sim_opts, true);
  sim->add_option("--expect", expect, "Expected verdict; exit 2 on mismatch")
      ->check(CLI::IsMember({"completed", "blowup_detected", "step_floor_reached"}));

  BarrierOptions bar_opts;
  auto* bar = app.add_subcommand("barrier", "Residual audit of the barrier families as CSV");
  bar->add_option("--family", bar_opts.family, "super or sub")->check(CLI::IsMember({"super", "sub"}));
  bar->add_option("--a-min", bar_opts.a_min, "Smallest family parameter")->check(CLI::PositiveNumber);
  bar->add_option("--a-max", bar_opts.a_max, "Largest family parameter")->check(CLI::PositiveNumber);
  bar->add_option("--a-count", bar_opts.a_count, "Log-spaced parameter count");
  bar->add_option("--mass", bar_opts.masses, "Masses (numbers or multiples of pi), default pi..8pi");
  bar->add_option("--xi-count", bar_opts.xi_count, "Interior xi samples");
  bar->add_option("-o,--out", bar_opts.out, "Output file (default stdout)");

  ConfigOptions steady_opts;
  auto* steady = app.add_subcommand("steady", "Newton probes and uniqueness sweep at the configured mass");
  add_config_options(steady, steady_opts, true);

  std::string audit_dir;
  std::string audit_out;
  auto* audit = app.add_subcommand("energy-audit", "Write energy_audit.csv for a trace directory");
  audit->add_option("trace_dir", audit_dir, "Directory containing trace.csv")
      ->required()
      ->check(CLI::ExistingDirectory);
  audit->add_option("-o,--out", audit_out, "Output file (default <trace_dir>/energy_audit.csv)");

  ConfigOptions sweep_opts;
  std::string axis;
  std::vector<std::string> values;
  std::size_t workers = 0;
  auto* sweep = app.add_subcommand("sweep", "Run the template over one axis and merge into sweep.csv");
  add_config_options(sweep, sweep_opts, true);
  sweep->add_option("--axis", axis, "Dotted key to vary, e.g. mass or initial.lambda")->required();
  sweep->add_option("--values", values, "Axis values")->delimiter(',');
  sweep->add_option("-j,--jobs", workers, "Worker threads (default: hardware concurrency)");

  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("check", "Run the invariant suite");
  check->add_option("--seed", check_seed, "Seed for randomized properties");

  ConfigOptions scen_opts;
  std::string scenario_name;
  auto* scen = app.add_subcommand("scenario", "verify-global, dichotomy, uniqueness or check");
  scen->add_option("name", scenario_name, "Scenario name")->required();
  add_config_options(scen, scen_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return cmd_simulate(sim_opts, expect);
    if (*bar) return cmd_barrier(bar_opts);
    if (*steady) return report(run_steady(load(steady_opts)));
    if (*audit) return cmd_energy_audit(audit_dir, audit_out);
    if (*sweep) return cmd_sweep(sweep_opts, axis, values, workers);
    if (*check) return report(run_checks(check_seed));
    if (*scen) {
      ConfigOptions o = scen_opts;
      nlohmann::json doc = load_document(o);
      if (!doc.contains("mass")) {
        if (scenario_name != "check" && scenario_name != "uniqueness") {
          throw ConfigError("missing required key 'mass'");
        }
        doc["mass"] = "8pi";  // unused by these scenarios
      }
      return report(run_scenario(scenario_name, parse_config(doc)));
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnknownScenario& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
