#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "critmass/radial.hpp"
#include "critmass/solver.hpp"

namespace critmass {

/// Rejected configuration document; the message names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GridSettings {
  std::size_t intervals = 512;
  double gamma = 1.0;
};

struct SchemeSettings {
  double dt0 = 0.01;
  double cfl = 0.45;
  double t_end = 10.0;
  std::optional<double> dt_min;
  double dt_max = 0.01;
  double dt_grow = 1.2;
  std::optional<double> u_blowup_threshold;
};

struct InitialSettings {
  PresetKind kind = PresetKind::constant;
  double parameter = 0.0;  // lambda for pks, a for barrier, unused for constant
};

struct OutputSettings {
  std::string dir = "out";
  double snapshot_every = 1.0;
};

/// A validated experiment. Build with parse_config.
struct ExperimentConfig {
  double mass = 0.0;
  GridSettings grid;
  SchemeSettings scheme;
  InitialSettings initial;
  OutputSettings output;
  std::uint64_t seed = 0;
  nlohmann::json document;  // flat dotted keys as given

  GridPtr make_grid() const;
  SchemeConfig scheme_config(GridPtr grid) const;
  MassProfile initial_profile(GridPtr grid) const;
  /// Same experiment with a different total mass, revalidated.
  ExperimentConfig with_mass(double mass) const;
};

/// Flattens nested objects into dotted keys: {"grid": {"n": 8}} -> {"grid.n": 8}.
nlohmann::json flatten_document(const nlohmann::json& document);

/**
 * Validates a JSON document and fills defaults.
 *
 * Keys: mass (required), grid.n, grid.gamma, scheme.dt0, scheme.cfl,
 * scheme.t_end, scheme.dt_min, scheme.dt_max, scheme.dt_grow,
 * scheme.u_blowup_threshold, initial.kind, initial.lambda, initial.a,
 * output.dir, output.snapshot_every, seed. Numbers may be given as strings
 * such as "8pi" or "2.5*pi". Unknown keys are rejected.
 */
ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses a number or a multiple of pi ("pi", "8pi", "0.5*pi").
double parse_number_token(std::string_view token);

}  // namespace critmass
