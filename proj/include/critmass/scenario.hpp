#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "critmass/config.hpp"
#include "critmass/csv.hpp"
#include "critmass/energy.hpp"
#include "critmass/solver.hpp"
#include "critmass/steady.hpp"

namespace critmass {

class UnknownScenario : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Summary lines plus the assertions that failed. Exit status 0 or 2.
struct ScenarioResult {
  Summary summary;
  std::vector<std::string> failures;

  int exit_code() const { return failures.empty() ? 0 : 2; }
};

struct SimulationOutcome {
  SimulationTrace trace;
  DecayReport decay;
  ConvergenceReport convergence;
};

SimulationOutcome run_simulation(const ExperimentConfig& config, const StepObserver& observer = {});

/// trace.csv, snap_<k>.csv and energy_audit.csv.
void write_simulation_files(const std::filesystem::path& dir, const SimulationOutcome& outcome);

/// Run description without wall-clock data, so repeated runs agree byte for byte.
Summary simulation_summary(const ExperimentConfig& config, const SimulationOutcome& outcome);

void write_summary_file(const std::filesystem::path& dir, const Summary& summary);

/// Barrier confinement after the first snapshot time T.
struct ConfinementReport {
  double barrier_time = 0.0;
  std::optional<double> barrier_a;
  std::string barrier_error;  // why no barrier was found
  double ratio_bound = 0.0;   // m (a+1)/a
  double max_excess = 0.0;    // max over t >= T of M - W_a, at least 0
  double max_ratio = 0.0;     // max over t >= T of sup M/xi
  bool confined = false;
};

struct GlobalReport {
  SimulationOutcome outcome;
  ConfinementReport confinement;
  double gradient_bound = 0.0;  // bound on |v_r| over the run
};

/// Simulates, fits a dominating barrier to the profile at t = snapshot_every
/// and checks M <= W_a + 1e-10 m and sup M/xi <= m (a+1)/a at every later step.
GlobalReport verify_global(const ExperimentConfig& config);

/// Expected verdict of a run at this mass: completed up to 8 pi, otherwise none.
std::optional<Verdict> expected_verdict(double mass);

/// "8pi" for integer multiples of pi, else the number.
std::string mass_label(double mass);

/**
 * Named scenarios writing into config.output.dir:
 *
 *  - verify-global: verify_global at the configured mass
 *  - dichotomy:     the configured shape at 8 pi and 10 pi
 *  - uniqueness:    Newton probes and sweeps for m in {pi, 2pi, 4pi, 8pi}
 *  - check:         the invariant suite
 *
 * Throws UnknownScenario for any other name.
 */
ScenarioResult run_scenario(std::string_view name, const ExperimentConfig& config);

/// Newton probes from every initialization plus a uniqueness sweep at one mass.
/// Writes newton_<m>.csv and, for m <= 8 pi, sweep_<m>.csv.
ScenarioResult run_steady(const ExperimentConfig& config);

/// The property suite behind scenario check; independent of the config grid.
ScenarioResult run_checks(std::uint64_t seed);

/// One merged row of sweep.csv.
struct SweepRow {
  std::string value;  // axis value as given
  double parameter = 0.0;
  bool ok = false;
  std::string verdict;
  double t_final = 0.0;
  std::optional<double> blowup_time;
  double sup_u_max = 0.0;
  double final_sup_distance = 0.0;
  double energy_budget_relative = 0.0;
  std::string error;
};

/**
 * Runs the template once per axis value on `workers` threads. Each run writes
 * its files to <dir>/run_<k>, k the position in `values`. Rows are sorted by
 * parameter; a failed run becomes an error row.
 */
std::vector<SweepRow> run_sweep(const nlohmann::json& base, const std::string& axis,
                                const std::vector<nlohmann::json>& values,
                                const std::filesystem::path& dir, std::size_t workers);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace critmass
