#pragma once

// Per-period dispatch state of a restoration run, in per-unit on the
// system base. Vectors are ordered like the case's element lists; served
// arrays have one entry per bus/node, zero where the element carries no
// load slot. At a boundary bus the served entry is the intertie exchange
// (negative when the feeder exports).

#include <Eigen/Core>
#include <vector>

namespace restore {

struct FeederState {
  Eigen::VectorXd v_sq;           // per node, squared voltage
  Eigen::VectorXd line_p;         // sending-end flow per line, in case file
                                  // order, oriented away from the substation
  Eigen::VectorXd line_q;
  Eigen::VectorXd line_l;         // squared current per line
  Eigen::VectorXd dg_p, dg_q;     // per DG
  Eigen::VectorXd ess_p, ess_q;   // per ESS (discharge positive)
  Eigen::VectorXd ess_loss;       // per ESS
  Eigen::VectorXd pv_p, pv_q;     // per PV
  Eigen::VectorXd served_p, served_q;  // per node
  double grid_p = 0.0;            // substation exchange (import positive)
  double grid_q = 0.0;
};

struct PeriodState {
  Eigen::VectorXd v;              // per bus, voltage magnitude
  Eigen::VectorXd theta;          // per bus, radians
  Eigen::VectorXd gen_p, gen_q;   // per central generator
  Eigen::VectorXd served_p, served_q;  // per bus
  std::vector<FeederState> feeders;
};

struct RestorationSolution {
  std::vector<PeriodState> periods;
};

}  // namespace restore
