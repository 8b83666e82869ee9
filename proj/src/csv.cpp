#include "critmass/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace critmass {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace {

constexpr const char* kTraceHeader = "t,dt,sup_u,sup_M_over_xi,energy,dissipation,second_moment";

template <class... T>
void row(std::ostream& out, const T&... values) {
  bool first = true;
  ((out << (first ? "" : ",") << values, first = false), ...);
  out << '\n';
}

std::string num(double v) { return format_number(v); }

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<Diagnostics>& rows) {
  out << kTraceHeader << '\n';
  for (const Diagnostics& d : rows) {
    row(out, num(d.t), num(d.dt), num(d.sup_u), num(d.sup_ratio), num(d.energy),
        num(d.dissipation), num(d.second_moment));
  }
}

std::vector<Diagnostics> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw std::runtime_error("trace CSV: unexpected header '" + line + "'");
  std::vector<Diagnostics> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v[7];
    std::stringstream fields(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(fields, cell, ',')) {
      if (k == 7) break;
      char* end = nullptr;
      v[k] = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) k = 8;
      else ++k;
    }
    if (k != 7 || fields.rdbuf()->in_avail() > 0) {
      throw std::runtime_error("trace CSV: malformed line " + std::to_string(number));
    }
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
  }
  return rows;
}

void write_energy_audit_csv(std::ostream& out, const std::vector<EnergyAuditRow>& rows) {
  out << "t,F,D,dFdt_est,budget_residual\n";
  for (const EnergyAuditRow& r : rows) {
    row(out, num(r.t), num(r.energy), num(r.dissipation), num(r.dfdt_estimate),
        num(r.budget_residual));
  }
}

void write_residual_audit_csv(std::ostream& out, const std::vector<ResidualAuditRow>& rows) {
  out << "a,m,xi,residual_closed,residual_fd,abs_err\n";
  for (const ResidualAuditRow& r : rows) {
    row(out, num(r.parameter), num(r.mass), num(r.xi), num(r.closed_form),
        num(r.finite_difference), num(r.abs_error));
  }
}

void write_newton_csv(std::ostream& out, const std::vector<NewtonIterate>& history) {
  out << "iteration,residual,distance\n";
  for (const NewtonIterate& it : history) row(out, it.iteration, num(it.residual), num(it.distance));
}

void write_sweep_samples_csv(std::ostream& out, const SweepReport& report) {
  out << "family,parameter,min_margin,verdict\n";
  auto emit = [&](const char* family, const std::vector<SweepSample>& samples) {
    for (const SweepSample& s : samples) {
      row(out, family, num(s.parameter), num(s.margin), s.ordered ? "ordered" : "violated");
    }
  };
  emit("super", report.super_samples);
  emit("sub", report.sub_samples);
}

void write_summary(std::ostream& out, const Summary& summary) {
  for (const auto& [key, value] : summary) out << key << '=' << value << '\n';
}

}  // namespace critmass
