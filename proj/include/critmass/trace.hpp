#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "critmass/radial.hpp"

namespace critmass {

enum class Verdict { completed, blowup_detected, step_floor_reached };

std::string_view to_string(Verdict verdict);

/// Per-step diagnostics recorded by the solver.
struct Diagnostics {
  double t = 0.0;
  double dt = 0.0;
  double sup_u = 0.0;
  double sup_ratio = 0.0;  // sup over xi > 0 of M/xi
  double energy = 0.0;
  double dissipation = 0.0;
  double second_moment = 0.0;
};

struct Snapshot {
  double t = 0.0;
  MassProfile profile;
};

/// Why and where a run was declared singular.
struct BlowupReport {
  enum class Trigger { threshold, step_floor };
  Trigger trigger = Trigger::threshold;
  double time = 0.0;
  std::size_t node = 0;  // argmax of u over interior nodes
  double xi_peak = 0.0;
  double sup_u = 0.0;
};

struct SimulationTrace {
  double mass = 0.0;
  std::vector<Diagnostics> rows;  // strictly increasing in t
  std::vector<Snapshot> snapshots;
  std::optional<MassProfile> final_profile;
  Verdict verdict = Verdict::completed;
  std::optional<BlowupReport> blowup;
  std::size_t rejected_steps = 0;
  std::size_t repaired_steps = 0;  // accepted steps that needed a monotone repair

  std::vector<double> times() const;
  std::vector<double> energies() const;
  std::vector<double> dissipations() const;
};

}  // namespace critmass
