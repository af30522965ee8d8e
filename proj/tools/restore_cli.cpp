// Command-line frontend: solve a coordinated restoration case, audit an
// existing solution, run the derivative checker, or dump a parsed case.
//
// Exit codes: 0 success; 1 parse/validation error; 2 solver
// nonconvergence; 3 audit failure.

#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "restore/formulation.hpp"
#include "restore/ingest.hpp"
#include "restore/report.hpp"
#include "restore/solver.hpp"
#include "restore/verify.hpp"

namespace {

struct CaseArgs {
  std::string bundled;
  std::string case_path;
  std::vector<std::string> feeder_paths;
  std::string scenario_path;
};

void add_case_flags(CLI::App* cmd, CaseArgs& a) {
  auto* b = cmd->add_option("--bundled", a.bundled,
                            "bundled case id (case_study_1 or case_study_2)");
  auto* c = cmd->add_option("--case", a.case_path, "transmission case file");
  cmd->add_option("--feeder", a.feeder_paths, "feeder file (repeatable)")
      ->needs(c);
  cmd->add_option("--scenario", a.scenario_path, "scenario file")->needs(c);
  b->excludes(c);
}

restore::CoupledCase load_case(const CaseArgs& a) {
  if (!a.bundled.empty())
    return restore::load_bundled(restore::bundled_case_from_string(a.bundled));
  if (a.case_path.empty())
    throw std::invalid_argument("either --bundled or --case is required");
  auto tn = restore::parse_transmission_file(a.case_path);
  std::vector<restore::DistributionFeeder> feeders;
  for (const auto& p : a.feeder_paths)
    feeders.push_back(restore::parse_feeder_file(p));
  if (a.scenario_path.empty())
    throw std::invalid_argument("--scenario is required with --case");
  auto [sc, prof] = restore::parse_scenario_file(a.scenario_path);
  auto c = restore::assemble_case(tn, std::move(feeders), sc, prof);
  auto outcome = restore::validate_case(c);
  if (!outcome.ok()) {
    std::string msg = "case validation failed:";
    for (const auto& e : outcome.errors) msg += "\n  " + e;
    throw std::invalid_argument(msg);
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinated transmission/distribution load restoration"};
  app.require_subcommand(1);

  CaseArgs solve_case, validate_case_args, deriv_case, show_case_args;
  std::string out_dir = "out", solution_path;
  double tol = 1e-6, ramp_limit = 0.0, fd_step = 1e-6;
  int max_iter = 500, period = -1, points = 5;
  std::uint64_t seed = 0;
  bool ramp_set = false;

  auto* cmd_solve = app.add_subcommand("solve", "solve a restoration case");
  add_case_flags(cmd_solve, solve_case);
  cmd_solve->add_option("--out", out_dir, "report output directory");
  cmd_solve->add_option("--tol", tol, "KKT tolerance");
  cmd_solve->add_option("--max-iter", max_iter, "iteration limit");
  cmd_solve->add_option("--seed", seed, "solver seed");
  cmd_solve->add_option("--period", period,
                        "print tables for this period (default: last)");
  cmd_solve
      ->add_option("--ramp-limit", ramp_limit,
                   "enable generator ramp limit (MW per period)")
      ->each([&](const std::string&) { ramp_set = true; });

  auto* cmd_validate =
      app.add_subcommand("validate", "audit a solution.csv against a case");
  add_case_flags(cmd_validate, validate_case_args);
  cmd_validate->add_option("--solution", solution_path, "solution.csv path")
      ->required();

  auto* cmd_deriv = app.add_subcommand("check-derivatives",
                                       "finite-difference derivative check");
  add_case_flags(cmd_deriv, deriv_case);
  cmd_deriv->add_option("--seed", seed, "sample seed");
  cmd_deriv->add_option("--points", points, "number of interior points");
  cmd_deriv->add_option("--step", fd_step, "finite-difference step");

  auto* cmd_show = app.add_subcommand("show-case", "print a parsed case");
  add_case_flags(cmd_show, show_case_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_show->parsed()) {
      auto c = load_case(show_case_args);
      std::cout << "buses: " << c.buses.size()
                << ", branches: " << c.branches.size()
                << ", generators: " << c.generators.size() << "\n";
      for (const auto& f : c.feeders) {
        double p = 0, q = 0;
        for (const auto& n : f.nodes) {
          p += n.p_load_total;
          q += n.q_load_total;
        }
        std::cout << "feeder " << f.id << ": " << f.nodes.size()
                  << " nodes, boundary bus " << f.boundary_bus << ", load "
                  << p << " MW / " << q << " MVAr\n";
      }
      std::cout << "periods: " << c.scenario.periods
                << ", penalty: " << c.scenario.central_gen_penalty
                << " per MW, critical fraction: "
                << c.scenario.critical_fraction
                << ", w_t: " << c.scenario.w_t << ", w_d: " << c.scenario.w_d
                << "\n";
      return 0;
    }

    if (cmd_deriv->parsed()) {
      auto c = load_case(deriv_case);
      auto nlp = restore::assemble(c);
      auto prob = restore::make_problem(nlp);
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> u(0.2, 0.8);
      double worst = 0.0;
      bool ok = true;
      for (int pt = 0; pt < points; ++pt) {
        Eigen::VectorXd x(prob.n);
        for (int i = 0; i < prob.n; ++i) {
          double lo = prob.lower(i), hi = prob.upper(i);
          if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 1.0 : -0.5;
          if (!std::isfinite(hi)) hi = lo + 1.0;
          x(i) = lo + u(rng) * (hi - lo);
        }
        auto rep = restore::check_derivatives(prob, x, fd_step);
        worst = std::max({worst, rep.max_rel_gradient, rep.max_rel_jac_eq,
                          rep.max_rel_jac_ineq});
        for (const auto& f : rep.flagged) std::cout << "flagged: " << f << "\n";
        ok = ok && rep.ok();
      }
      std::cout << "checked " << points
                << " points, max relative error: " << worst << "\n";
      return ok ? 0 : 3;
    }

    if (cmd_validate->parsed()) {
      auto c = load_case(validate_case_args);
      auto cp = restore::to_per_unit(c);
      auto sol = restore::read_solution_csv(cp, solution_path);
      auto rep = restore::audit_solution(c, sol);
      std::cout << rep.to_text();
      return rep.pass ? 0 : 3;
    }

    // solve
    auto c = load_case(solve_case);
    restore::FormulationOptions fopts;
    if (ramp_set) {
      fopts.ramp_enabled = true;
      fopts.ramp_limit = ramp_limit / c.scenario.system_base;
    }
    auto nlp = restore::assemble(c, fopts);
    auto prob = restore::make_problem(nlp);
    restore::SolverOptions sopts;
    sopts.kkt_tolerance = tol;
    sopts.max_iterations = max_iter;
    sopts.seed = seed;
    Eigen::VectorXd x0 = nlp->flat_start();
    auto result = restore::solve(prob, restore::default_start(prob, &x0), sopts);
    std::cout << "solver: " << restore::to_string(result.status) << " in "
              << result.iterations
              << " iterations, kkt residual: " << result.kkt_residual
              << ", objective: " << result.objective << "\n";
    if (result.status != restore::SolveStatus::converged) return 2;

    restore::RestorationSchedule sched;
    sched.case_pu = nlp->case_pu();
    sched.solution = nlp->extract_solution(result.x);
    nlp->objective_split(result.x, sched.unserved_energy, sched.penalty_term);
    sched.solver_status = restore::to_string(result.status);
    sched.iterations = result.iterations;
    sched.kkt_residual = result.kkt_residual;

    auto audit = restore::audit_solution(c, sched.solution);
    audit.kkt_residual = restore::recompute_kkt_residual(prob, result);
    sched.audited = audit.pass;

    int show = period < 0 ? c.scenario.periods - 1 : period;
    std::cout << "\nboundary exchange, period " << show << ":\n"
              << restore::format_boundary_table(
                     restore::emit_boundary_table(sched, show))
              << "\ncentral generation, period " << show << ":\n"
              << restore::format_generation_table(
                     restore::emit_generation_table(sched, show));
    restore::emit_schedule_csv(sched, out_dir);
    std::cout << "\nreports written to " << out_dir << "\n";
    if (!audit.pass) {
      std::cerr << "audit failed:\n" << audit.to_text();
      return 3;
    }
    std::cout << "audit: pass (max balance residual "
              << std::max(audit.max_tn_balance_residual,
                          audit.max_dn_balance_residual)
              << " pu)\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
