#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "critmass/barriers.hpp"
#include "critmass/energy.hpp"
#include "critmass/steady.hpp"
#include "critmass/trace.hpp"

namespace critmass {

/// Shortest round-trip text with 17 significant digits.
std::string format_number(double value);

/// `t,dt,sup_u,sup_M_over_xi,energy,dissipation,second_moment`
void write_trace_csv(std::ostream& out, const std::vector<Diagnostics>& rows);
/// Inverse of write_trace_csv; throws std::runtime_error naming the bad line.
std::vector<Diagnostics> read_trace_csv(std::istream& in);

/// `t,F,D,dFdt_est,budget_residual`
void write_energy_audit_csv(std::ostream& out, const std::vector<EnergyAuditRow>& rows);

/// `a,m,xi,residual_closed,residual_fd,abs_err`
void write_residual_audit_csv(std::ostream& out, const std::vector<ResidualAuditRow>& rows);

/// `iteration,residual,distance`
void write_newton_csv(std::ostream& out, const std::vector<NewtonIterate>& history);

/// `family,parameter,min_margin,verdict`
void write_sweep_samples_csv(std::ostream& out, const SweepReport& report);

/// `key=value` lines in the given order.
using Summary = std::vector<std::pair<std::string, std::string>>;
void write_summary(std::ostream& out, const Summary& summary);

}  // namespace critmass
