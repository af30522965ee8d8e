#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "restore/ingest.hpp"
#include "restore/report.hpp"

using namespace restore;

namespace {

RestorationSchedule sample_schedule() {
  RestorationSchedule s;
  s.case_pu = to_per_unit(load_bundled(BundledCaseId::case_study_1));
  const auto& c = s.case_pu;
  const int T = c.scenario.periods;
  s.solution.periods.resize(T);
  for (int t = 0; t < T; ++t) {
    PeriodState& ps = s.solution.periods[t];
    ps.v = Eigen::VectorXd::Ones(c.buses.size());
    ps.theta = Eigen::VectorXd::Zero(c.buses.size());
    ps.gen_p = Eigen::VectorXd::Zero(c.generators.size());
    ps.gen_q = Eigen::VectorXd::Zero(c.generators.size());
    ps.served_p = Eigen::VectorXd::Zero(c.buses.size());
    ps.served_q = Eigen::VectorXd::Zero(c.buses.size());
    for (int f = 0; f < (int)c.feeders.size(); ++f) {
      const auto& fd = c.feeders[f];
      FeederState fs;
      fs.v_sq = Eigen::VectorXd::Ones(fd.nodes.size());
      fs.served_p = Eigen::VectorXd::Zero(fd.nodes.size());
      fs.served_q = Eigen::VectorXd::Zero(fd.nodes.size());
      fs.line_p = Eigen::VectorXd::Zero(fd.lines.size());
      fs.line_q = Eigen::VectorXd::Zero(fd.lines.size());
      fs.line_l = Eigen::VectorXd::Zero(fd.lines.size());
      fs.dg_p = Eigen::VectorXd::Zero(fd.dgs.size());
      fs.dg_q = Eigen::VectorXd::Zero(fd.dgs.size());
      fs.ess_p = Eigen::VectorXd::Zero(fd.esss.size());
      fs.ess_q = Eigen::VectorXd::Zero(fd.esss.size());
      fs.ess_loss = Eigen::VectorXd::Zero(fd.esss.size());
      fs.pv_p = Eigen::VectorXd::Zero(fd.pvs.size());
      fs.pv_q = Eigen::VectorXd::Zero(fd.pvs.size());
      ps.feeders.push_back(std::move(fs));
    }
  }
  // distinctive values in period 2 for the table tests
  PeriodState& ps = s.solution.periods[2];
  ps.feeders[0].grid_p = -0.0696;
  ps.feeders[0].grid_q = -0.03;
  ps.feeders[1].grid_p = 0.0974;
  ps.feeders[2].grid_p = -0.2546;
  ps.v(4) = 1.0325;   // bus 5, D1 boundary
  ps.gen_p(0) = 1.1462;
  ps.gen_p(1) = 0.4828;
  s.solver_status = "converged";
  s.iterations = 42;
  s.kkt_residual = 5e-7;
  return s;
}

}  // namespace

TEST_CASE("boundary table carries MW on the base with exchange signs") {
  RestorationSchedule s = sample_schedule();
  auto rows = emit_boundary_table(s, 2);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].feeder == "D1");
  CHECK(rows[0].p_mw == doctest::Approx(-6.96).epsilon(1e-12));
  CHECK(rows[0].v_pu == doctest::Approx(1.0325).epsilon(1e-12));
  CHECK(rows[1].p_mw > 0.0);
  CHECK(rows[2].p_mw < 0.0);
  std::string txt = format_boundary_table(rows);
  CHECK(txt.find("-6.96") != std::string::npos);
  CHECK(txt.find("1.0325") != std::string::npos);
}

TEST_CASE("generation table lists the five generator buses") {
  RestorationSchedule s = sample_schedule();
  auto rows = emit_generation_table(s, 2);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].bus == 1);
  CHECK(rows[0].p_mw == doctest::Approx(114.62).epsilon(1e-12));
  CHECK(rows[1].p_mw == doctest::Approx(48.28).epsilon(1e-12));
  CHECK(rows[4].p_mw == doctest::Approx(0.0));
  std::string txt = format_generation_table(rows);
  CHECK(txt.find("114.62") != std::string::npos);
  CHECK(txt.find("48.28") != std::string::npos);
}

TEST_CASE("a zero-dispatch schedule renders zero tables") {
  RestorationSchedule s = sample_schedule();
  auto rows = emit_generation_table(s, 0);
  for (const auto& r : rows) {
    CHECK(r.p_mw == 0.0);
    CHECK(r.q_mvar == 0.0);
  }
  for (const auto& r : emit_boundary_table(s, 0)) CHECK(r.p_mw == 0.0);
}

TEST_CASE("period bounds are enforced") {
  RestorationSchedule s = sample_schedule();
  CHECK_THROWS_AS(emit_boundary_table(s, 6), std::out_of_range);
  CHECK_THROWS_AS(emit_generation_table(s, -1), std::out_of_range);
  CHECK_THROWS_AS(served_fraction(s, "tn", 99), std::out_of_range);
  CHECK_THROWS_AS(served_fraction(s, "nope", 0), std::out_of_range);
}

TEST_CASE("served fraction counts only load-carrying elements") {
  RestorationSchedule s = sample_schedule();
  CHECK(served_fraction(s, "tn", 0) == doctest::Approx(0.0));
  // serve exactly half of every transmission load at t = 1
  const auto& c = s.case_pu;
  for (int b = 0; b < (int)c.buses.size(); ++b)
    s.solution.periods[1].served_p(b) =
        0.5 * c.buses[b].p_load_total * c.profiles.load_profile[1];
  CHECK(served_fraction(s, "tn", 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("CSV artifacts round-trip the full solution state") {
  RestorationSchedule s = sample_schedule();
  s.unserved_energy = 1.23;
  s.penalty_term = 4.56;
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "restore_report_test";
  std::filesystem::remove_all(dir);
  emit_schedule_csv(s, dir.string());
  for (const char* f : {"boundary.csv", "generation.csv", "served.csv",
                        "solution.csv", "summary.json"})
    CHECK(std::filesystem::exists(dir / f));

  RestorationSolution back =
      read_solution_csv(s.case_pu, (dir / "solution.csv").string());
  REQUIRE(back.periods.size() == s.solution.periods.size());
  for (size_t t = 0; t < back.periods.size(); ++t) {
    const auto& a = s.solution.periods[t];
    const auto& b = back.periods[t];
    CHECK((a.v - b.v).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((a.served_p - b.served_p).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((a.gen_p - b.gen_p).cwiseAbs().maxCoeff() < 1e-9);
    for (size_t f = 0; f < a.feeders.size(); ++f) {
      CHECK((a.feeders[f].v_sq - b.feeders[f].v_sq).cwiseAbs().maxCoeff() <
            1e-9);
      CHECK(a.feeders[f].grid_p == doctest::Approx(b.feeders[f].grid_p));
      CHECK((a.feeders[f].ess_p - b.feeders[f].ess_p).cwiseAbs().maxCoeff() <
            1e-9);
    }
  }

  // header check on the documented schemas
  std::ifstream in(dir / "boundary.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "period,feeder,p_mw,q_mvar,v_pu");

  CHECK_THROWS_AS(read_solution_csv(s.case_pu, (dir / "served.csv").string()),
                  std::runtime_error);
  std::filesystem::remove_all(dir);
}
