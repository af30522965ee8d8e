#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "restore/solver.hpp"

using namespace restore;

namespace {

// min (x-3)^2 on [0, 10]
NlpProblem quadratic_box() {
  NlpProblem p;
  p.n = 1;
  p.lower = Eigen::VectorXd::Constant(1, 0.0);
  p.upper = Eigen::VectorXd::Constant(1, 10.0);
  p.objective = [](const Eigen::VectorXd& x) {
    return (x(0) - 3.0) * (x(0) - 3.0);
  };
  p.gradient = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(1);
    g(0) = 2.0 * (x(0) - 3.0);
  };
  p.lag_hessian = [](const Eigen::VectorXd&, double sigma,
                     const Eigen::VectorXd&, const Eigen::VectorXd&,
                     Eigen::SparseMatrix<double>& h) {
    h.resize(1, 1);
    h.insert(0, 0) = 2.0 * sigma;
  };
  p.var_names = {"x"};
  return p;
}

// min x1 + x2 s.t. x1^2 + x2^2 = 2, x >= 0 -> (1, 1) in the positive orthant
NlpProblem circle_equality() {
  NlpProblem p;
  p.n = 2;
  p.m_eq = 1;
  p.lower = Eigen::VectorXd::Constant(2, 0.0);
  p.upper = Eigen::VectorXd::Constant(
      2, std::numeric_limits<double>::infinity());
  p.objective = [](const Eigen::VectorXd& x) { return x.sum(); };
  p.gradient = [](const Eigen::VectorXd&, Eigen::VectorXd& g) {
    g = Eigen::VectorXd::Ones(2);
  };
  p.eval_eq = [](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    r.resize(1);
    r(0) = x.squaredNorm() - 2.0;
  };
  p.jac_eq = [](const Eigen::VectorXd& x, Eigen::SparseMatrix<double>& j) {
    j.resize(1, 2);
    j.insert(0, 0) = 2.0 * x(0);
    j.insert(0, 1) = 2.0 * x(1);
  };
  p.lag_hessian = [](const Eigen::VectorXd&, double, const Eigen::VectorXd& y,
                     const Eigen::VectorXd&, Eigen::SparseMatrix<double>& h) {
    h.resize(2, 2);
    h.insert(0, 0) = 2.0 * y(0);
    h.insert(1, 1) = 2.0 * y(0);
  };
  p.var_names = {"x1", "x2"};
  p.eq_names = {"circle"};
  return p;
}

}  // namespace

TEST_CASE("bound-constrained quadratic reaches its optimum") {
  NlpProblem p = quadratic_box();
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 9.0);
  SolveResult r = solve(p, x0);
  CHECK(r.status == SolveStatus::converged);
  CHECK(std::abs(r.x(0) - 3.0) < 1e-8);
  CHECK(r.objective < 1e-8);
  CHECK(r.kkt_residual <= 1e-6);
}

TEST_CASE("equality-constrained analytic problem reaches (1, 1)") {
  NlpProblem p = circle_equality();
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(2, 0.5);
  SolveResult r = solve(p, x0);
  CHECK(r.status == SolveStatus::converged);
  // the minimizer in the positive orthant is (-1,-1) reflected: with
  // x >= 0 the KKT point from an interior start is (1, 1)
  CHECK(std::abs(r.x(0) - 1.0) < 1e-6);
  CHECK(std::abs(r.x(1) - 1.0) < 1e-6);
}

TEST_CASE("two runs produce bit-identical iterates") {
  NlpProblem p = circle_equality();
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(2, 0.7);
  SolveResult a = solve(p, x0);
  SolveResult b = solve(p, x0);
  CHECK(a.iterate_hash == b.iterate_hash);
  CHECK(a.iterations == b.iterations);
  CHECK(a.x(0) == b.x(0));
  CHECK(a.x(1) == b.x(1));
}

TEST_CASE("iteration limit is reported, never silently accepted") {
  NlpProblem p = circle_equality();
  SolverOptions o;
  o.max_iterations = 1;
  SolveResult r = solve(p, Eigen::VectorXd::Constant(2, 0.5), o);
  CHECK(r.status == SolveStatus::iteration_limit);
}

TEST_CASE("option validation and non-finite start are rejected") {
  NlpProblem p = quadratic_box();
  SolverOptions bad;
  bad.step_fraction = 1.5;
  CHECK_THROWS_AS(solve(p, Eigen::VectorXd::Constant(1, 5.0), bad),
                  std::invalid_argument);
  NlpProblem q = quadratic_box();
  q.objective = [](const Eigen::VectorXd&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(solve(q, Eigen::VectorXd::Constant(1, 5.0), {}),
                  std::runtime_error);
}

TEST_CASE("default start is strictly interior") {
  NlpProblem p = quadratic_box();
  Eigen::VectorXd x = default_start(p);
  CHECK(x(0) > p.lower(0));
  CHECK(x(0) < p.upper(0));
  Eigen::VectorXd hint = Eigen::VectorXd::Constant(1, -5.0);
  Eigen::VectorXd y = default_start(p, &hint);
  CHECK(y(0) > p.lower(0));
}

TEST_CASE("derivative checker: clean problem passes, corruption is named") {
  NlpProblem p = circle_equality();
  Eigen::VectorXd x = Eigen::VectorXd::Constant(2, 0.8);
  DerivativeCheck rep = check_derivatives(p, x);
  CHECK(rep.ok());
  CHECK(rep.max_rel_gradient < 1e-8);
  CHECK(rep.max_rel_jac_eq < 1e-8);

  p.jac_eq = [](const Eigen::VectorXd& x, Eigen::SparseMatrix<double>& j) {
    j.resize(1, 2);
    j.insert(0, 0) = 2.0 * x(0) + 0.5;  // corrupted entry
    j.insert(0, 1) = 2.0 * x(1);
  };
  DerivativeCheck bad = check_derivatives(p, x);
  CHECK(!bad.ok());
  REQUIRE(!bad.flagged.empty());
  CHECK(bad.flagged[0].find("circle") != std::string::npos);
  CHECK(bad.flagged[0].find("x1") != std::string::npos);
}

TEST_CASE("reported KKT residual is reproducible from the result") {
  NlpProblem p = circle_equality();
  SolveResult r = solve(p, Eigen::VectorXd::Constant(2, 0.6));
  REQUIRE(r.status == SolveStatus::converged);
  double again = kkt_residual_norm(p, r.x, r.y_eq, r.y_ineq, r.z_lower,
                                   r.z_upper, r.slacks, r.objective_scaling);
  CHECK(std::abs(again - r.kkt_residual) < 1e-10);
}
