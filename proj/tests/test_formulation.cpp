#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "restore/formulation.hpp"
#include "restore/ingest.hpp"

using namespace restore;

namespace {

CoupledCase tiny_tn_case() {
  // two buses joined by a lossless reactance, one generator, one load
  CoupledCase c;
  c.buses.push_back({1, 0.0, 0.0, 0.0, 0.0, 0.95, 1.06});
  c.buses.push_back({2, 50.0, 0.0, 25.0, 0.0, 0.95, 1.06});
  c.branches.push_back({1, 2, 0.0, 0.1, 0.0});
  c.generators.push_back({1, 0.0, 100.0, -50.0, 50.0});
  c.scenario.periods = 1;
  c.profiles.load_profile = {1.0};
  c.profiles.pv_profile = {0.0};
  return c;
}

}  // namespace

TEST_CASE("variable index is deterministic and period-major") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_1);
  VariableIndex a = index_variables(to_per_unit(c));
  VariableIndex b = index_variables(to_per_unit(c));
  CHECK(a.n == b.n);
  CHECK(a.n == a.n_per_period * 6);
  CHECK(a.v(0, 0) == b.v(0, 0));
  CHECK(a.fgridq(5, 2) == b.fgridq(5, 2));
  CHECK(a.fgridq(5, 2) == a.n - 1);  // last slot of the last feeder block
  // boundary buses always carry a served slot
  for (int i = 0; i < a.nbus; ++i)
    if (a.is_boundary[i]) CHECK(a.tn_load_slot[i] >= 0);
}

TEST_CASE("objective: zero when all load is served by DERs, penalty per MW") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_1);
  auto nlp = assemble(c);
  const auto& idx = nlp->index();
  const auto& cp = nlp->case_pu();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(nlp->num_vars());
  for (int t = 0; t < idx.periods; ++t) {
    double lp = cp.profiles.load_profile[t];
    for (int b = 0; b < idx.nbus; ++b)
      if (int s = idx.tn_load_slot[b]; s >= 0 && !idx.is_boundary[b])
        x(idx.plp(t, s)) = cp.buses[b].p_load_total * lp;
    for (int f = 0; f < (int)idx.feeders.size(); ++f)
      for (int k = 0; k < idx.feeders[f].nnode; ++k)
        if (int s = idx.feeders[f].load_slot[k]; s >= 0)
          x(idx.fdlp(t, f, s)) = cp.feeders[f].nodes[k].p_load_total * lp;
  }
  CHECK(nlp->objective(x) == doctest::Approx(0.0).epsilon(1e-12));

  // 1 MW of central generation for one period costs the stated 1e7
  x(idx.gp(2, 0)) = 1.0 / cp.scenario.system_base;
  CHECK(nlp->objective(x) == doctest::Approx(1e7).epsilon(1e-10));
  double unserved, penalty;
  nlp->objective_split(x, unserved, penalty);
  CHECK(unserved == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(penalty == doctest::Approx(1e7).epsilon(1e-10));
}

TEST_CASE("case study 2 weights transmission load twice") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_2);
  REQUIRE(c.scenario.w_t == 2.0);
  auto nlp = assemble(c);
  const auto& idx = nlp->index();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nlp->num_vars());
  double f0 = nlp->objective(x);

  // serving 0.01 pu less at a TN bus costs twice a DN node's shortfall
  int slot = -1;
  for (int b = 0; b < idx.nbus; ++b)
    if (idx.tn_load_slot[b] >= 0 && !idx.is_boundary[b]) {
      slot = idx.tn_load_slot[b];
      break;
    }
  REQUIRE(slot >= 0);
  x(idx.plp(0, slot)) = 0.01;
  double dtn = f0 - nlp->objective(x);
  x(idx.plp(0, slot)) = 0.0;
  int fslot = idx.feeders[0].load_slot[1] >= 0 ? idx.feeders[0].load_slot[1]
                                               : idx.feeders[0].load_slot[0];
  REQUIRE(fslot >= 0);
  x(idx.fdlp(0, 0, fslot)) = 0.01;
  double ddn = f0 - nlp->objective(x);
  CHECK(dtn == doctest::Approx(2.0 * ddn).epsilon(1e-12));
}

TEST_CASE("transmission branch flow matches the hand-evaluated polar form") {
  CoupledCase c = tiny_tn_case();
  auto nlp = assemble(c);
  const auto& idx = nlp->index();
  Eigen::VectorXd x = nlp->flat_start();
  x(idx.v(0, 0)) = 1.0;
  x(idx.v(0, 1)) = 1.0;
  x(idx.th(0, 0)) = 0.1;
  x(idx.th(0, 1)) = 0.0;
  x(idx.gp(0, 0)) = 0.0;
  x(idx.gq(0, 0)) = 0.0;
  int s = idx.tn_load_slot[1];
  x(idx.plp(0, s)) = 0.0;
  x(idx.plq(0, s)) = 0.0;
  Eigen::VectorXd r;
  nlp->eval_eq(x, r);
  // bus 1 balance: residual = -P_1 = -sin(0.1)/0.1 pu
  CHECK(r(0) == doctest::Approx(-std::sin(0.1) / 0.1).epsilon(1e-12));
  // bus 2 receives what bus 1 sends (lossless line)
  CHECK(r(1) == doctest::Approx(std::sin(0.1) / 0.1).epsilon(1e-12));
}

TEST_CASE("feeder branch-flow residuals vanish at the scalar fixed point") {
  // one line r=0.01, x=0.02, receiving load 1 + j0.5 pu, sending v = 1
  CoupledCase c;
  c.buses.push_back({1, 0.0, 0.0, 0.0, 0.0, 0.95, 1.06});
  c.generators.push_back({1, 0.0, 500.0, -100.0, 100.0});
  DistributionFeeder fd;
  fd.id = "F";
  fd.boundary_bus = 1;
  fd.substation_node = 1;
  fd.nodes.push_back({1, 0.0, 0.0, 0.0, 0.0, 0.9025, 1.1236});
  fd.nodes.push_back({2, 100.0, 50.0, 100.0, 50.0, 0.0, 10.0});
  fd.lines.push_back({1, 2, 0.01, 0.02});
  c.feeders.push_back(fd);
  c.scenario.periods = 1;
  c.scenario.critical_fraction = 1.0;
  c.profiles.load_profile = {1.0};
  c.profiles.pv_profile = {0.0};

  // scalar fixed point for the sending-end flow and squared current
  double P = 1.0, Q = 0.5, L = 0.0;
  for (int i = 0; i < 200; ++i) {
    L = (P * P + Q * Q) / 1.0;
    P = 1.0 + 0.01 * L;
    Q = 0.5 + 0.02 * L;
  }
  double v2 = 1.0 - 2.0 * (0.01 * P + 0.02 * Q) + (0.01 * 0.01 + 0.02 * 0.02) * L;

  auto nlp = assemble(c);
  const auto& idx = nlp->index();
  Eigen::VectorXd x = nlp->flat_start();
  x(idx.fv(0, 0, 0)) = 1.0;
  x(idx.fv(0, 0, 1)) = v2;
  x(idx.flp(0, 0, 0)) = P;
  x(idx.flq(0, 0, 0)) = Q;
  x(idx.fll(0, 0, 0)) = L;
  x(idx.fdlp(0, 0, 0)) = 1.0;
  x(idx.fdlq(0, 0, 0)) = 0.5;
  x(idx.fgridp(0, 0)) = P;
  x(idx.fgridq(0, 0)) = Q;
  int s = idx.tn_load_slot[0];
  x(idx.plp(0, s)) = P;
  x(idx.plq(0, s)) = Q;
  x(idx.v(0, 0)) = 1.0;
  x(idx.th(0, 0)) = 0.0;

  Eigen::VectorXd r;
  nlp->eval_eq(x, r);
  // the four feeder physics rows: vdrop, ldef, nodal P/Q balance
  const auto names = nlp->eq_names();
  for (int i = 0; i < r.size(); ++i) {
    if (names[i].find("F.") == std::string::npos) continue;
    CHECK_MESSAGE(std::abs(r(i)) < 1e-8, names[i]);
  }
}

TEST_CASE("ESS loss equality matches the hand evaluation") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_1);
  auto nlp = assemble(c);
  const auto& idx = nlp->index();
  Eigen::VectorXd x = nlp->flat_start();
  x(idx.fessp(0, 0, 0)) = 0.2;
  x(idx.fessq(0, 0, 0)) = 0.1;
  int node = -1;
  node = idx.feeders[0].node_index.at(nlp->case_pu().feeders[0].esss[0].node);
  x(idx.fv(0, 0, node)) = 1.0;
  x(idx.fessl(0, 0, 0)) = 5e-4;  // 0.01*(0.04) + 0.01*(0.01)
  Eigen::VectorXd r;
  nlp->eval_eq(x, r);
  const auto names = nlp->eq_names();
  for (int i = 0; i < r.size(); ++i)
    if (names[i] == "t0.D1.essloss3")
      CHECK(r(i) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("bounds follow the case tables") {
  CoupledCase c1 = load_bundled(BundledCaseId::case_study_1);
  auto nlp = assemble(c1);
  const auto& idx = nlp->index();
  const auto& lo = nlp->lower();
  const auto& hi = nlp->upper();

  // bus 3 served P in [0.5, 1.0] x 94.2 MW, profile-scaled (t=2: 1.00)
  int b3 = idx.bus_index.at(3);
  int s3 = idx.tn_load_slot[b3];
  CHECK(lo(idx.plp(2, s3)) == doctest::Approx(0.4710).epsilon(1e-12));
  CHECK(hi(idx.plp(2, s3)) == doctest::Approx(0.9420).epsilon(1e-12));
  // profile 0.90 at t=0 scales both ends
  CHECK(hi(idx.plp(0, s3)) == doctest::Approx(0.9420 * 0.90).epsilon(1e-12));

  // squared feeder voltage window
  CHECK(lo(idx.fv(0, 0, 1)) == doctest::Approx(0.9025).epsilon(1e-12));
  CHECK(hi(idx.fv(0, 0, 1)) == doctest::Approx(1.1236).epsilon(1e-12));

  // boundary exchange slots are intertie-bounded, not load-bounded
  int bb = idx.bus_index.at(c1.feeders[0].boundary_bus);
  int sb = idx.tn_load_slot[bb];
  CHECK(lo(idx.plp(0, sb)) == doctest::Approx(-1.0));
  CHECK(hi(idx.plp(0, sb)) == doctest::Approx(1.0));

  // PV cap follows the profile; reactive range follows the power factor
  CHECK(hi(idx.fpvp(3, 0, 0)) == doctest::Approx(0.03 * 0.80).epsilon(1e-12));
  CHECK(hi(idx.fpvq(3, 0, 0)) ==
        doctest::Approx(0.9 * 0.03 * 0.80).epsilon(1e-12));
  CHECK(hi(idx.fpvp(0, 0, 0)) == doctest::Approx(0.0));

  // case study 2 caps bus 2 at 48.28 MW
  CoupledCase c2 = load_bundled(BundledCaseId::case_study_2);
  auto nlp2 = assemble(c2);
  const auto& idx2 = nlp2->index();
  int g2 = -1;
  for (int g = 0; g < (int)c2.generators.size(); ++g)
    if (c2.generators[g].bus == 2) g2 = g;
  REQUIRE(g2 >= 0);
  CHECK(nlp2->upper()(idx2.gp(0, g2)) == doctest::Approx(0.4828).epsilon(1e-12));
}

TEST_CASE("the two bundled problems share dimensions and sparsity") {
  auto n1 = assemble(load_bundled(BundledCaseId::case_study_1));
  auto n2 = assemble(load_bundled(BundledCaseId::case_study_2));
  CHECK(n1->num_vars() == n2->num_vars());
  CHECK(n1->num_eq() == n2->num_eq());
  CHECK(n1->num_ineq() == n2->num_ineq());
  Eigen::VectorXd x = n1->flat_start();
  Eigen::SparseMatrix<double> j1, j2;
  n1->jac_eq(x, j1);
  n2->jac_eq(x, j2);
  CHECK(j1.nonZeros() == j2.nonZeros());
}

TEST_CASE("every variable and constraint carries a unique name") {
  auto nlp = assemble(load_bundled(BundledCaseId::case_study_1));
  auto vn = nlp->var_names();
  auto en = nlp->eq_names();
  CHECK((int)vn.size() == nlp->num_vars());
  CHECK((int)en.size() == nlp->num_eq());
  std::set<std::string> seen;
  for (const auto& s : vn) {
    CHECK(!s.empty());
    CHECK(seen.insert(s).second);
  }
  seen.clear();
  for (const auto& s : en) {
    CHECK(!s.empty());
    CHECK(seen.insert(s).second);
  }
}

TEST_CASE("pack and extract are inverse on the variable vector") {
  auto nlp = assemble(load_bundled(BundledCaseId::case_study_1));
  Eigen::VectorXd x = nlp->flat_start();
  for (int i = 0; i < x.size(); ++i) x(i) += 1e-3 * std::sin(i);
  RestorationSolution s = nlp->extract_solution(x);
  Eigen::VectorXd y = nlp->pack_solution(s);
  CHECK((x - y).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
}
