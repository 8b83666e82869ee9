#include "critmass/trace.hpp"

#include <algorithm>

namespace critmass {

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::completed: return "completed";
    case Verdict::blowup_detected: return "blowup_detected";
    case Verdict::step_floor_reached: return "step_floor_reached";
  }
  return "unknown";
}

std::vector<double> SimulationTrace::times() const {
  std::vector<double> out(rows.size());
  std::transform(rows.begin(), rows.end(), out.begin(), [](const Diagnostics& d) { return d.t; });
  return out;
}

std::vector<double> SimulationTrace::energies() const {
  std::vector<double> out(rows.size());
  std::transform(rows.begin(), rows.end(), out.begin(),
                 [](const Diagnostics& d) { return d.energy; });
  return out;
}

std::vector<double> SimulationTrace::dissipations() const {
  std::vector<double> out(rows.size());
  std::transform(rows.begin(), rows.end(), out.begin(),
                 [](const Diagnostics& d) { return d.dissipation; });
  return out;
}

}  // namespace critmass
