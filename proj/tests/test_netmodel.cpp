#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "restore/ingest.hpp"
#include "restore/netmodel.hpp"

using namespace restore;

TEST_CASE("bundled case validates and feeder sums match replaced bus loads") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_1);
  CHECK(validate_case(c).ok());

  const double expect_p[3] = {10.398, 34.66, 17.33};
  const double expect_q[3] = {5.0448, 16.816, 8.408};
  for (int f = 0; f < 3; ++f) {
    double p = 0, q = 0;
    for (const auto& n : c.feeders[f].nodes) {
      p += n.p_load_total;
      q += n.q_load_total;
    }
    CHECK(p == doctest::Approx(expect_p[f]).epsilon(1e-12));
    CHECK(q == doctest::Approx(expect_q[f]).epsilon(1e-12));
  }
  // boundary buses carry no native load
  for (int b : {5, 9, 14}) {
    CHECK(find_bus(c, b)->p_load_total == 0.0);
    CHECK(find_bus(c, b)->q_load_total == 0.0);
  }
}

TEST_CASE("critical loads are critical_fraction * totals everywhere") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_1);
  const double k = c.scenario.critical_fraction;
  for (const auto& b : c.buses) {
    CHECK(b.p_load_critical == doctest::Approx(k * b.p_load_total));
    CHECK(b.q_load_critical == doctest::Approx(k * b.q_load_total));
  }
  for (const auto& f : c.feeders)
    for (const auto& n : f.nodes) {
      CHECK(n.p_load_critical == doctest::Approx(k * n.p_load_total));
      CHECK(n.q_load_critical == doctest::Approx(k * n.q_load_total));
    }
}

TEST_CASE("cycle in feeder line set is a radiality error") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_1);
  FeederLine extra;
  extra.from_node = 1;
  extra.to_node = 2;
  extra.x = 0.01;
  c.feeders[0].lines.push_back(extra);
  auto out = validate_case(c);
  CHECK_FALSE(out.ok());
  bool found = false;
  for (const auto& e : out.errors)
    if (e.find("not radial") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("ess surplus above capacity is an invariant error") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_1);
  c.feeders[0].esss[0].e_surplus = 60.0;
  c.feeders[0].esss[0].e_max = 50.0;
  auto out = validate_case(c);
  CHECK_FALSE(out.ok());
  bool found = false;
  for (const auto& e : out.errors)
    if (e.find("e_surplus") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("validation collects multiple errors instead of stopping") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_1);
  c.feeders[0].esss[0].e_surplus = 60.0;
  c.generators[0].p_min = 500.0;  // p_min > p_max
  auto out = validate_case(c);
  CHECK(out.errors.size() >= 2);
}

TEST_CASE("to_per_unit divides by base and is idempotent") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_1);
  CoupledCase pu = to_per_unit(c);
  CHECK(find_bus(pu, 3)->p_load_total == doctest::Approx(0.9420));
  CHECK(find_bus(pu, 1)->p_load_total == 0.0);
  CHECK(pu.feeders[0].esss[0].e_max == doctest::Approx(0.5));
  CHECK(pu.per_unit);
  CoupledCase again = to_per_unit(pu);
  CHECK(again.feeders[0].esss[0].e_max == doctest::Approx(0.5));
  CHECK(find_bus(again, 3)->p_load_total == doctest::Approx(0.9420));
}

TEST_CASE("validation is unit-invariant") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_2);
  CHECK(validate_case(c).ok() == validate_case(to_per_unit(c)).ok());
  // also for a broken case
  c.feeders[1].esss[0].e_surplus = 99.0;
  CHECK(validate_case(c).ok() == validate_case(to_per_unit(c)).ok());
  CHECK_FALSE(validate_case(to_per_unit(c)).ok());
}

TEST_CASE("to_per_unit rejects nonpositive base") {
  CoupledCase c = load_bundled(BundledCaseId::case_study_1);
  c.scenario.system_base = 0.0;
  CHECK_THROWS_AS(to_per_unit(c), std::invalid_argument);
}
