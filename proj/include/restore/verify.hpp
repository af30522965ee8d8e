#pragma once

// Independent validation of restoration solutions: a Newton-Raphson AC
// power-flow oracle for the transmission side, a DistFlow sweep oracle
// for the feeders, and an auditor that re-derives every constraint
// family from raw case data. Deliberately shares no evaluation code
// with the formulation module.

#include <string>
#include <vector>

#include "restore/netmodel.hpp"
#include "restore/nlp.hpp"
#include "restore/solution.hpp"
#include "restore/solver.hpp"

namespace restore {

struct PowerFlowResult {
  bool converged = false;
  int iterations = 0;
  Eigen::VectorXd v;      // per bus, case order
  Eigen::VectorXd theta;  // radians
};

// Polar Newton-Raphson on the full mismatch system. Net injections
// (generation minus load, pu) are fixed at every non-slack bus; the
// slack bus holds slack_v and zero relative angle offset is not
// assumed — slack_theta is passed through.
PowerFlowResult newton_power_flow(const std::vector<TransmissionBus>& buses,
                                  const std::vector<TransmissionBranch>& branches,
                                  const Eigen::VectorXd& p_inj,
                                  const Eigen::VectorXd& q_inj,
                                  int slack_index, double slack_v,
                                  double slack_theta = 0.0,
                                  double tol = 1e-10, int max_iter = 50);

struct SweepResult {
  bool converged = false;
  int iterations = 0;
  Eigen::VectorXd v_sq;    // per node, case order
  Eigen::VectorXd line_p;  // per line, case order, sending end, oriented
  Eigen::VectorXd line_q;  //   away from the substation
  Eigen::VectorXd line_l;
  double root_p = 0.0;     // implied substation import
  double root_q = 0.0;
};

// Backward-forward DistFlow sweep on a radial feeder (pu). p_inj/q_inj
// are net nodal injections (DER output minus served load) per node in
// case order, excluding the substation exchange.
SweepResult distflow_sweep(const DistributionFeeder& feeder,
                           const Eigen::VectorXd& p_inj,
                           const Eigen::VectorXd& q_inj, double root_v_sq,
                           double tol = 1e-10, int max_iter = 200);

struct ValidationReport {
  double max_tn_balance_residual = 0.0;  // pu
  double max_dn_balance_residual = 0.0;  // pu
  double max_bound_violation = 0.0;      // pu
  double max_boundary_mismatch = 0.0;    // pu
  double oracle_voltage_deviation = 0.0; // pu
  double kkt_residual = 0.0;             // filled by recompute_kkt_residual
  bool pass = false;
  std::vector<std::string> failures;     // itemized, one line each

  std::string to_text() const;
};

constexpr double kAuditTolerance = 1e-6;

// Recomputes every constraint family of the restoration model from raw
// case data, checks bounds, boundary consensus, ESS energy windows, and
// cross-validates against both power-flow oracles.
ValidationReport audit_solution(const CoupledCase& c,
                                const RestorationSolution& s);

// KKT inf-norm of a solver result, re-derived from the problem callbacks
// (matches SolveResult::kkt_residual to 1e-10).
double recompute_kkt_residual(const NlpProblem& p, const SolveResult& r);

}  // namespace restore
