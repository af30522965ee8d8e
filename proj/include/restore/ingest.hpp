#pragma once

// Case-file parsing and the bundled IEEE 14-bus + 3x modified 13-node
// restoration instance (both case-study generator parameter sets).
//
// File format: sectioned plain text. `[section]` headers, `#` comments.
// Table sections hold one whitespace-separated record per line; scalar
// sections hold `key = value` pairs. Unknown sections and keys are
// rejected. All quantities are in physical units (MW / MVAr / MWh).

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "restore/netmodel.hpp"

namespace restore {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& where, int line, const std::string& what)
      : std::runtime_error(where + ":" + std::to_string(line) + ": " + what) {}
};

struct TransmissionSystem {
  std::vector<TransmissionBus> buses;
  std::vector<TransmissionBranch> branches;
  std::vector<CentralGenerator> generators;
  double s_base = 100.0;
};

// Sections: [base] s_base_MVA; [bus] id p_load_MW q_load_MVAr v_min_pu
// v_max_pu; [branch] from to r_pu x_pu b_pu; [gen] bus p_min_MW p_max_MW
// q_min_MVAr q_max_MVAr.
TransmissionSystem parse_transmission(const std::string& text,
                                      const std::string& name = "<string>");

// Sections: [node] id p_load_MW q_load_MVAr v_min_pu v_max_pu; [line]
// from to r_pu x_pu; [dg] node p_min_MW p_max_MW q_min_MVAr q_max_MVAr;
// [ess] node e_surplus_MWh e_max_MWh s_max_MVA r_eq_pu r_cvt_pu;
// [pv] node p_max_MW pf; [boundary] substation_node, transmission_bus;
// [feeder] id.
DistributionFeeder parse_feeder(const std::string& text,
                                const std::string& name = "<string>");

// Sections: [scenario] periods, delta_t_h, w_t, w_d,
// central_gen_penalty_per_MW, critical_fraction, intertie_s_max_MVA;
// [profiles] load, pv (comma-separated multipliers). Absent optional
// keys take the bundled defaults.
std::pair<ScenarioConfig, ProfileSeries> parse_scenario(
    const std::string& text, const std::string& name = "<string>");

// File-reading wrappers.
TransmissionSystem parse_transmission_file(const std::string& path);
DistributionFeeder parse_feeder_file(const std::string& path);
std::pair<ScenarioConfig, ProfileSeries> parse_scenario_file(
    const std::string& path);

std::string serialize_transmission(const TransmissionSystem& tn);
std::string serialize_feeder(const DistributionFeeder& f);
std::string serialize_scenario(const ScenarioConfig& sc,
                               const ProfileSeries& prof);

// Combines parsed parts into a CoupledCase: zeroes the native load at
// every boundary bus (the attached feeder replaces it) and recomputes
// critical loads from the scenario's critical_fraction.
CoupledCase assemble_case(const TransmissionSystem& tn,
                          std::vector<DistributionFeeder> feeders,
                          const ScenarioConfig& sc, const ProfileSeries& prof);

enum class BundledCaseId { case_study_1, case_study_2 };

BundledCaseId bundled_case_from_string(const std::string& s);

// Fully validated bundled instance. The two cases differ in the
// central-generation limit table, the transmission load weight, and the
// central-generation penalty (applied in case study 1 only).
CoupledCase load_bundled(BundledCaseId id);

// Raw text of the bundled case files (for show-case / docs).
std::string bundled_transmission_text(BundledCaseId id);
std::string bundled_feeder_text(int feeder_index);  // 0..2
std::string bundled_scenario_text(BundledCaseId id);

}  // namespace restore
