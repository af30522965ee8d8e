#pragma once

// Generic sparse nonlinear program:
//   min f(x)  s.t.  c_eq(x) = 0,  c_ineq(x) <= 0,  lower <= x <= upper.
// All callbacks are pure in x and safe to evaluate concurrently at
// distinct points. Jacobian and Hessian sparsity patterns are fixed
// across evaluations.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <string>
#include <vector>

namespace restore {

struct NlpProblem {
  int n = 0;
  int m_eq = 0;
  int m_ineq = 0;

  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  std::function<double(const Eigen::VectorXd&)> objective;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> gradient;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> eval_eq;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> eval_ineq;
  std::function<void(const Eigen::VectorXd&, Eigen::SparseMatrix<double>&)>
      jac_eq;
  std::function<void(const Eigen::VectorXd&, Eigen::SparseMatrix<double>&)>
      jac_ineq;
  // Hessian of sigma*f + y_eq.c_eq + y_ineq.c_ineq (full symmetric).
  std::function<void(const Eigen::VectorXd&, double, const Eigen::VectorXd&,
                     const Eigen::VectorXd&, Eigen::SparseMatrix<double>&)>
      lag_hessian;

  std::vector<std::string> var_names;
  std::vector<std::string> eq_names;
  std::vector<std::string> ineq_names;
};

}  // namespace restore
