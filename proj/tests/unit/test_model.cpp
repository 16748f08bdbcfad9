#include <cmath>

#include <doctest.h>

#include "pulsefront/errors.hpp"
#include "pulsefront/model.hpp"

using namespace pulsefront;

TEST_CASE("harvest rules and slopes at zero") {
  CHECK(HarvestRule::linear(0.5).apply(3.0) == 1.5);
  CHECK(HarvestRule::linear(0.5).slope0() == 0.5);
  const HarvestRule bh = HarvestRule::beverton_holt(1.0, 1.25);
  CHECK(bh.apply(1.0) == doctest::Approx(1.0 / 2.25));
  CHECK(bh.slope0() == doctest::Approx(0.8));
  const HarvestRule rk = HarvestRule::ricker(-0.5, 2.0);
  CHECK(rk.apply(0.3) == doctest::Approx(0.3 * std::exp(-0.5 - 0.6)));
  CHECK(rk.slope0() == doctest::Approx(std::exp(-0.5)));
  CHECK(HarvestRule::identity().apply(0.7) == 0.7);
  CHECK(harvest_slope0(HarvestRule::identity()) == 1.0);
  CHECK(apply_harvest(bh, 0.0) == 0.0);
}

TEST_CASE("harvest rejects bad input") {
  CHECK_THROWS_AS(HarvestRule::linear(-0.1).apply(1.0), ConfigError);
  CHECK_THROWS_AS(HarvestRule::beverton_holt(0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(HarvestRule::linear(0.5).apply(-1e-3), ConfigError);
}

TEST_CASE("harvest hypothesis") {
  CHECK(validate_harvest(HarvestRule::linear(0.5), 4.0).passed);
  CHECK(validate_harvest(HarvestRule::identity(), 4.0).passed);
  CHECK(validate_harvest(HarvestRule::beverton_holt(1.0, 1.25), 4.0).passed);
  CHECK(validate_harvest(HarvestRule::ricker(-0.1, 0.2), 4.0).passed);
  // u e^{-bu} turns over at 1/b, inside the range
  CHECK_FALSE(validate_harvest(HarvestRule::ricker(-0.1, 1.0), 4.0).passed);
  const HypothesisCheck bad = validate_harvest(HarvestRule::ricker(0.5, 1.0), 4.0);
  CHECK_FALSE(bad.passed);
  CHECK(bad.name == "A");
  CHECK(bad.witness.has_value());
  // ratio above 1
  CHECK_FALSE(validate_harvest(HarvestRule::linear(1.5), 4.0).passed);
  CHECK_FALSE(validate_harvest(HarvestRule::beverton_holt(2.0, 1.0), 4.0).passed);
}

TEST_CASE("periodic coefficient slots") {
  const PeriodicFunction f(std::vector<double>{1.0, 3.0});
  CHECK_FALSE(f.is_constant());
  CHECK(f.sup() == 3.0);
  CHECK(f.inf() == 1.0);
  CHECK(f.at_phase(0.25) == 1.0);
  CHECK(f.at_phase(0.75) == 3.0);
  CHECK(f.at_step(0, 10) == 1.0);
  CHECK(f.at_step(4, 10) == 1.0);
  CHECK(f.at_step(5, 10) == 3.0);
  CHECK(f.at_step(15, 10) == 3.0);
  CHECK(PeriodicFunction(2.0).is_constant());
}

TEST_CASE("coefficient validation lists every violation") {
  Coefficients c;
  c.b = PeriodicFunction(0.0);
  c.alpha2 = PeriodicFunction(-1.0);
  c.tau = 0.0;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.violations().size() == 3);
  }
  CHECK_NOTHROW(Coefficients{}.validate());
}

TEST_CASE("bump initial data") {
  const InitialData d = InitialData::bump(2.0, 0.5, 0.25);
  CHECK(d.u1(0.0) == 0.5);
  CHECK(d.u2(0.0) == 0.25);
  CHECK(d.u1(2.0) == 0.0);
  CHECK(d.u1(-2.0) == 0.0);
  CHECK(d.u1(3.0) == 0.0);
  CHECK(d.u1(1.0) == doctest::Approx(0.5 * std::cos(M_PI / 4)));
  CHECK(d.sup1() == 0.5);
  CHECK(d.scaled(2.0).sup2() == 0.5);
}

TEST_CASE("profile initial data interpolates") {
  const InitialData d = InitialData::profile({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}, {0.0, 2.0, 0.0});
  CHECK(d.u1(0.5) == doctest::Approx(0.5));
  CHECK(d.u2(-0.25) == doctest::Approx(1.5));
  CHECK(d.u1(1.5) == 0.0);
  CHECK(d.half_length() == 1.0);
}

TEST_CASE("a priori bound") {
  Coefficients c;
  c.b = PeriodicFunction(std::vector<double>{2.0, 4.0});
  c.alpha1 = PeriodicFunction(std::vector<double>{1.0, 0.5});
  c.a = 1.0;
  c.alpha2 = 0.25;
  // max{4 / 0.5, 1 / 0.25, amplitudes}
  CHECK(a_priori_bound(c, InitialData::bump(1.0, 0.5, 0.5)) == 8.0);
  CHECK(a_priori_bound(c, InitialData::bump(1.0, 9.0, 0.5)) == 9.0);
}

TEST_CASE("hypothesis report") {
  ModelParams p;
  HypothesisReport r = validate_hypotheses(p);
  CHECK(r.all_passed());
  for (const char* name : {"J1", "J2", "A", "frontier", "a02"}) CHECK(r.find(name) != nullptr);

  p.harvest = HarvestRule::ricker(0.5, 1.0);
  r = validate_hypotheses(p);
  CHECK_FALSE(r.all_passed());
  CHECK_FALSE(r.find("A")->passed);

  ModelParams q;
  q.initial = InitialData::profile({-1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0});
  CHECK_FALSE(validate_hypotheses(q).find("a02")->passed);
}

TEST_CASE("kernel hypothesis") {
  CHECK(validate_kernel(Kernel::triangular(1.0)).passed);
  CHECK(validate_kernel(Kernel::truncated_gaussian(0.7)).passed);
}
