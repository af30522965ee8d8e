#pragma once

// Report emitters: boundary and generation summary tables plus CSV
// and JSON artifacts for batch runs. Values are stored per-unit and
// rendered in MW/MVAr on the system base.

#include <string>
#include <vector>

#include "restore/netmodel.hpp"
#include "restore/solution.hpp"

namespace restore {

struct RestorationSchedule {
  CoupledCase case_pu;          // per-unit case the solution belongs to
  RestorationSolution solution; // per-unit
  double unserved_energy = 0.0; // objective decomposition, pu*h
  double penalty_term = 0.0;
  std::string solver_status;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool audited = false;         // set once audit_solution passed
};

struct BoundaryRow {
  std::string feeder;
  double p_mw = 0.0;   // negative: feeder exports to the grid
  double q_mvar = 0.0;
  double v_pu = 0.0;   // boundary bus voltage magnitude
};

struct GenerationRow {
  int bus = 0;
  double p_mw = 0.0;
  double q_mvar = 0.0;
};

// Both throw std::out_of_range when period is outside the horizon.
std::vector<BoundaryRow> emit_boundary_table(const RestorationSchedule& s,
                                             int period);
std::vector<GenerationRow> emit_generation_table(const RestorationSchedule& s,
                                                 int period);

// Fixed-width text with 2-decimal MW/MVAr columns.
std::string format_boundary_table(const std::vector<BoundaryRow>& rows);
std::string format_generation_table(const std::vector<GenerationRow>& rows);

// Writes boundary.csv, generation.csv, served.csv, solution.csv and
// summary.json under out_dir (created if missing). Full precision.
void emit_schedule_csv(const RestorationSchedule& s, const std::string& out_dir);

// Reads a solution.csv written by emit_schedule_csv back into a solution
// shaped by the given case. Throws std::runtime_error on malformed input.
RestorationSolution read_solution_csv(const CoupledCase& case_pu,
                                      const std::string& path);

// Served active-power fraction per period: served / profile-scaled total,
// for the transmission network (network = "tn") or a feeder id.
double served_fraction(const RestorationSchedule& s, const std::string& network,
                       int period);

}  // namespace restore
