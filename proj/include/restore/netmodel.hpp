#pragma once

// Immutable data model for the coupled transmission + distribution
// restoration case: network elements, DER parameters, scenario config,
// and structural validation.

#include <string>
#include <vector>

namespace restore {

struct TransmissionBus {
  int id = 0;
  double p_load_total = 0.0;     // MW (pu after to_per_unit)
  double q_load_total = 0.0;     // MVAr
  double p_load_critical = 0.0;  // critical_fraction * total, sign-aware
  double q_load_critical = 0.0;
  double v_min = 0.95;  // voltage magnitude bounds, pu
  double v_max = 1.06;
};

struct TransmissionBranch {
  int from_bus = 0;
  int to_bus = 0;
  double r = 0.0;        // pu
  double x = 0.0;        // pu
  double b_shunt = 0.0;  // total line charging, pu
};

struct CentralGenerator {
  int bus = 0;
  double p_min = 0.0, p_max = 0.0;  // MW
  double q_min = 0.0, q_max = 0.0;  // MVAr
};

struct FeederNode {
  int id = 0;
  double p_load_total = 0.0;
  double q_load_total = 0.0;
  double p_load_critical = 0.0;
  double q_load_critical = 0.0;
  double v_sq_min = 0.95 * 0.95;  // squared-voltage bounds (DistFlow state)
  double v_sq_max = 1.06 * 1.06;
};

struct FeederLine {
  int from_node = 0;
  int to_node = 0;
  double r = 0.0;
  double x = 0.0;
};

struct DgDevice {
  int node = 0;
  double p_min = 0.0, p_max = 0.0;
  double q_min = 0.0, q_max = 0.0;
};

struct EssDevice {
  int node = 0;
  double e_surplus = 0.0;  // MWh usable at restoration start
  double e_max = 0.0;      // MWh capacity
  double s_max = 0.0;      // MVA converter rating
  double r_eq = 0.0;       // storage equivalent resistance, pu
  double r_cvt = 0.0;      // converter equivalent resistance, pu
};

struct PvDevice {
  int node = 0;
  double p_max = 0.0;         // MW
  double power_factor = 1.0;  // in (0, 1]
};

struct DistributionFeeder {
  std::string id;  // D1, D2, D3, ...
  std::vector<FeederNode> nodes;
  std::vector<FeederLine> lines;
  std::vector<DgDevice> dgs;
  std::vector<EssDevice> esss;
  std::vector<PvDevice> pvs;
  int substation_node = 0;
  int boundary_bus = 0;  // transmission bus this feeder replaces
};

struct ProfileSeries {
  std::vector<double> load_profile;  // per-period multiplier
  std::vector<double> pv_profile;
};

struct ScenarioConfig {
  int periods = 6;
  double delta_t = 1.0;  // hours
  double w_t = 1.0;      // transmission load priority weight
  double w_d = 1.0;      // distribution load priority weight
  double central_gen_penalty = 1e7;  // objective units per MW per period
  double critical_fraction = 0.5;
  double intertie_s_max = 100.0;  // MVA cap on each boundary P and Q
  double system_base = 100.0;     // MVA
};

struct CoupledCase {
  std::vector<TransmissionBus> buses;
  std::vector<TransmissionBranch> branches;
  std::vector<CentralGenerator> generators;
  std::vector<DistributionFeeder> feeders;
  ProfileSeries profiles;  // shared by transmission loads and all feeders
  ScenarioConfig scenario;
  bool per_unit = false;
};

struct ValidationOutcome {
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

// Recomputes critical loads as critical_fraction * totals at every bus
// and node. Called by the parsers after construction.
void apply_critical_fraction(CoupledCase& c);

// Structural validation: type invariants, feeder radiality, device node
// references, distinct boundary buses, zero native load at boundary buses.
// Collects every violation; never stops at the first.
ValidationOutcome validate_case(const CoupledCase& c);

// Divides powers by system_base and energies by system_base * 1h.
// Idempotent: a case already in per-unit is returned unchanged.
// Throws std::invalid_argument on non-positive system_base.
CoupledCase to_per_unit(const CoupledCase& c);

const TransmissionBus* find_bus(const CoupledCase& c, int id);
const FeederNode* find_node(const DistributionFeeder& f, int id);

}  // namespace restore
