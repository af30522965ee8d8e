#pragma once

// Sparse primal-dual interior-point solver for NlpProblem, plus a
// central-difference derivative checker. No knowledge of the power
// model; everything goes through the problem callbacks.

#include <cstdint>
#include <string>
#include <vector>

#include "restore/nlp.hpp"

namespace restore {

struct SolverOptions {
  double kkt_tolerance = 1e-6;      // inf-norm convergence threshold
  int max_iterations = 500;
  double initial_barrier = 0.1;     // mu_0
  double step_fraction = 0.995;     // fraction-to-boundary tau
  double regularization_floor = 1e-8;
  std::uint64_t seed = 0;           // reserved for randomized perturbation
};

enum class SolveStatus { converged, iteration_limit, infeasible_detected };

struct SolveResult {
  SolveStatus status = SolveStatus::iteration_limit;
  Eigen::VectorXd x;
  Eigen::VectorXd y_eq;     // equality multipliers (scaled problem)
  Eigen::VectorXd y_ineq;   // inequality multipliers, >= 0
  Eigen::VectorXd z_lower;  // bound multipliers, >= 0 (zero at infinite bounds)
  Eigen::VectorXd z_upper;
  Eigen::VectorXd slacks;   // inequality slacks, > 0
  double kkt_residual = 0.0;
  int iterations = 0;
  double objective = 0.0;         // unscaled f(x)
  double objective_scaling = 1.0; // sigma_f applied to f internally
  std::uint64_t iterate_hash = 0; // FNV-1a over the iterate sequence
};

const char* to_string(SolveStatus s);

// KKT inf-norm at mu = 0 for the sigma-scaled objective; the solver's
// convergence measure, reproducible from a SolveResult.
double kkt_residual_norm(const NlpProblem& p, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y_eq,
                         const Eigen::VectorXd& y_ineq,
                         const Eigen::VectorXd& z_lower,
                         const Eigen::VectorXd& z_upper,
                         const Eigen::VectorXd& slacks, double sigma_f);

SolveResult solve(const NlpProblem& problem, const Eigen::VectorXd& x0,
                  const SolverOptions& opts = {});

// Bound midpoints (or the hint, when given) pushed strictly inside the
// bounds by 1e-3 of each finite range.
Eigen::VectorXd default_start(const NlpProblem& problem,
                              const Eigen::VectorXd* hint = nullptr);

struct DerivativeCheck {
  double max_rel_gradient = 0.0;
  double max_rel_jac_eq = 0.0;
  double max_rel_jac_ineq = 0.0;
  std::vector<std::string> flagged;  // entries above tolerance, named
  bool ok() const { return flagged.empty(); }
};

DerivativeCheck check_derivatives(const NlpProblem& problem,
                                  const Eigen::VectorXd& x,
                                  double step = 1e-6);

}  // namespace restore
