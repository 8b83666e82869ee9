#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "critmass/config.hpp"
#include "critmass/constants.hpp"
#include "critmass/scenario.hpp"

using namespace critmass;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("critmass_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CRITMASS_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(ParseConfig, MinimalDocumentGetsDefaults) {
  const ExperimentConfig c =
      parse_config_text(R"({"mass": 25.1327412287, "initial.kind": "constant"})");
  EXPECT_EQ(c.grid.intervals, 512u);
  EXPECT_EQ(c.grid.gamma, 1.0);
  EXPECT_EQ(c.scheme.t_end, 10.0);
  EXPECT_EQ(c.initial.kind, PresetKind::constant);
}

TEST(ParseConfig, ConcentratedCriticalConfig) {
  const ExperimentConfig c = parse_config_text(
      R"({"mass": "8pi", "initial": {"kind": "pks", "lambda": 0.05}})");
  EXPECT_EQ(c.mass, kCriticalMass);
  EXPECT_EQ(c.initial.kind, PresetKind::pks);
  EXPECT_EQ(c.initial.parameter, 0.05);
  EXPECT_EQ(parse_config_text(R"({"mass": 25.132741228718345})").mass, kCriticalMass);
}

TEST(ParseConfig, Rejections) {
  EXPECT_THROW(parse_config_text(R"({"mass": 0})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"initial.kind": "constant"})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"mass": 1, "grid.n": 8})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"mass": 1, "grid.gamma": 4})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"mass": 1, "scheme.cfl": 2})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"mass": 1, "initial.kind": "dirac"})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"mass": 1, "initial.kind": "pks"})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"mass": 1, "colour": "red"})"), ConfigError);
  EXPECT_THROW(parse_config_text(R"({"mass": 1, "grid": {"n": 64}, "grid.n": 64})"), ConfigError);
  EXPECT_THROW(parse_config_text("{mass: 1"), ConfigError);
}

TEST(ParseNumberToken, PiMultiples) {
  EXPECT_EQ(parse_number_token("pi"), kPi);
  EXPECT_EQ(parse_number_token("8pi"), kCriticalMass);
  EXPECT_EQ(parse_number_token(" 2.5*pi "), 2.5 * kPi);
  EXPECT_EQ(parse_number_token("1e-3"), 1e-3);
  EXPECT_THROW(parse_number_token("eight"), ConfigError);
}

TEST(Scenario, UnknownNameRejected) {
  const ExperimentConfig c = parse_config_text(R"({"mass": 1})");
  EXPECT_THROW(run_scenario("nope", c), UnknownScenario);
}

TEST(Scenario, DichotomyAtDefaultGrid) {
  const fs::path dir = scratch("dichotomy");
  nlohmann::json doc = {{"mass", "8pi"}, {"initial.kind", "pks"}, {"initial.lambda", 0.05},
                        {"output.dir", dir.string()}};
  const ScenarioResult r = run_scenario("dichotomy", parse_config(doc));
  EXPECT_EQ(r.exit_code(), 0);
  const std::string summary = slurp(dir / "summary.txt");
  EXPECT_NE(summary.find("critical.verdict=completed"), std::string::npos);
  EXPECT_NE(summary.find("supercritical.verdict=blowup_detected"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "critical" / "trace.csv"));
  EXPECT_TRUE(fs::exists(dir / "supercritical" / "snap_0.csv"));
}

TEST(Scenario, VerifyGlobalSmallRun) {
  const fs::path dir = scratch("verify");
  nlohmann::json doc = {{"mass", "8pi"},          {"grid.n", 256},
                        {"grid.gamma", 2},        {"initial.kind", "pks"},
                        {"initial.lambda", 0.2},  {"scheme.t_end", 3},
                        {"output.dir", dir.string()}};
  const ScenarioResult r = run_scenario("verify-global", parse_config(doc));
  EXPECT_EQ(r.exit_code(), 0);
  const std::string summary = slurp(dir / "summary.txt");
  EXPECT_NE(summary.find("verdict=completed"), std::string::npos);
  EXPECT_NE(summary.find("barrier_confinement=pass"), std::string::npos);
  EXPECT_NE(summary.find("barrier_a="), std::string::npos);
  EXPECT_NE(summary.find("energy_budget_residual="), std::string::npos);
  EXPECT_NE(summary.find("final_sup_distance="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "energy_audit.csv"));
  EXPECT_TRUE(fs::exists(dir / "snap_3.csv"));

  // identical config, identical summary bytes
  const std::string first = summary;
  run_scenario("verify-global", parse_config(doc));
  EXPECT_EQ(slurp(dir / "summary.txt"), first);
}

TEST(Scenario, CheckSuitePasses) {
  const ScenarioResult r = run_checks(0);
  EXPECT_EQ(r.exit_code(), 0);
  for (const std::string& f : r.failures) ADD_FAILURE() << f;
}

TEST(Sweep, MassAxisConstantData) {
  const fs::path dir = scratch("sweep_mass");
  const nlohmann::json base = {{"mass", 1.0}, {"grid.n", 64}, {"scheme.t_end", 0.5}};
  const auto rows = run_sweep(base, "mass", {"8pi", "4pi", "6pi"}, dir, 3);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].value, "4pi");
  EXPECT_EQ(rows[1].value, "6pi");
  EXPECT_EQ(rows[2].value, "8pi");
  for (const SweepRow& r : rows) {
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.verdict, "completed");
  }
  EXPECT_TRUE(fs::exists(dir / "run_0" / "summary.txt"));
}

TEST(Sweep, RowsIndependentOfWorkerCount) {
  const nlohmann::json base = {{"mass", "10pi"}, {"grid.n", 128}, {"grid.gamma", 2},
                               {"scheme.t_end", 1}, {"initial.kind", "pks"}, {"initial.lambda", 0.1}};
  const std::vector<nlohmann::json> axis = {0.1, 0.02, 0.05, -1.0};
  std::ostringstream one, many;
  write_sweep_csv(one, run_sweep(base, "initial.lambda", axis, scratch("sweep_a"), 1));
  write_sweep_csv(many, run_sweep(base, "initial.lambda", axis, scratch("sweep_b"), 4));
  EXPECT_EQ(one.str(), many.str());
  const auto rows = run_sweep(base, "initial.lambda", axis, scratch("sweep_c"), 2);
  EXPECT_FALSE(rows[0].ok);  // lambda = -1 sorts first and fails validation
  EXPECT_NE(rows[0].error.find("initial.lambda"), std::string::npos);
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_TRUE(rows[k].ok);
}

TEST(Sweep, EmptyAxisGivesHeaderOnly) {
  std::ostringstream out;
  write_sweep_csv(out, run_sweep({{"mass", 1.0}}, "mass", {}, scratch("sweep_empty"), 2));
  const std::string text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  const fs::path cfg = dir / "c.json";
  std::ofstream(cfg) << R"({"mass": "10pi", "grid": {"n": 128, "gamma": 2},
    "scheme": {"t_end": 1}, "initial": {"kind": "barrier", "a": 0.01}})";
  const std::string base = cfg.string() + " -o " + (dir / "out").string();
  EXPECT_EQ(run_cli("simulate " + base + " --expect blowup_detected"), 0);
  EXPECT_EQ(run_cli("simulate " + base + " --expect completed"), 2);
  EXPECT_EQ(run_cli("energy-audit " + (dir / "out").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "energy_audit.csv"));
  EXPECT_EQ(run_cli("scenario nope " + cfg.string()), 1);
  EXPECT_EQ(run_cli("simulate"), 1);
  EXPECT_EQ(run_cli("simulate " + base + " --set mass=0"), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("barrier --a-count 3 --xi-count 5 -o " + (dir / "b.csv").string()), 0);
  EXPECT_EQ(slurp(dir / "b.csv").substr(0, 7), "a,m,xi,");
  EXPECT_EQ(run_cli("steady " + cfg.string() + " --set mass=2pi -o " + (dir / "st").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "st" / "newton_2pi.csv"));
  EXPECT_TRUE(fs::exists(dir / "st" / "sweep_2pi.csv"));
}
