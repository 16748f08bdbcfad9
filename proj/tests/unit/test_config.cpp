#include <algorithm>
#include <string>

#include <doctest.h>

#include "pulsefront/config.hpp"
#include "pulsefront/errors.hpp"

using namespace pulsefront;

namespace {

const std::string data = TEST_DATA_DIR;

std::string resolved(const RunConfig& c, const std::string& key) {
  for (const auto& [k, v] : c.resolved) {
    if (k == key) return v;
  }
  return "<missing>";
}

std::vector<std::string> violations_of(const std::string& text, bool strict = false) {
  try {
    parse_config_string(text, strict);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("minimal file gives documented defaults") {
  const RunConfig c = parse_config(data + "/minimal.ini");
  CHECK(c.params.coeffs.d1 == 1.0);
  CHECK(c.params.coeffs.tau == 1.0);
  CHECK(c.params.harvest.slope0() == 0.5);
  CHECK(c.params.frontier.h0 == 1.0);
  CHECK(c.params.k1 == Kernel::triangular(1.0));
  CHECK(c.params.same_kernels());
  CHECK(c.sim.dx == 0.05);
  CHECK(c.sim.dt == 0.01);
  CHECK(c.sim.horizon == 10);
  CHECK(c.numerics.eigen_n == 256);
  CHECK(c.numerics.left(1.0) == -1.0);
  CHECK_FALSE(c.sweep.has_value());
  CHECK(c.warnings.empty());
  CHECK(c.hypotheses.all_passed());
  // every default is recorded
  CHECK(resolved(c, "numerics.dt") == "0.01");
  CHECK(resolved(c, "harvest.rule") == "linear");
  CHECK(resolved(c, "classify.eps_vanish") == "auto");
  CHECK(resolved(c, "kernel.family2") == "same");
}

TEST_CASE("full file") {
  const RunConfig c = parse_config(data + "/sim.ini");
  CHECK(c.params.coeffs.b.sup() == 4.0);
  CHECK(c.params.frontier.mu_total() == 1.0);
  CHECK(c.sim.dt == 0.02);
  CHECK(c.sim.horizon == 4);
  CHECK(c.numerics.eigen_n == 64);
}

TEST_CASE("csv profile and periodic coefficients") {
  const RunConfig c = parse_config(data + "/profile.ini");
  CHECK(c.params.initial.u1(0.0) == 0.5);
  CHECK(c.params.initial.u2(0.5) == doctest::Approx(0.125));
  CHECK(c.params.coeffs.b.slot_count() == 4);
  CHECK_FALSE(c.params.coeffs.is_constant());
}

TEST_CASE("non-integer tau/dt is rejected by name") {
  try {
    parse_config(data + "/bad_dt.ini");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(e.violations().size() == 1);
    CHECK(e.violations()[0].find("tau/dt") != std::string::npos);
  }
}

TEST_CASE("all violations are reported") {
  try {
    parse_config(data + "/unknown.ini");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const auto& v = e.violations();
    CHECK(v.size() == 4);
    CHECK(mentions(v, "kernel.width"));
    CHECK(mentions(v, "numerics.steps"));
    CHECK(mentions(v, "[extras]"));
    CHECK(mentions(v, "numerics.dx"));
  }
}

TEST_CASE("hypothesis failures depend on strictness") {
  const RunConfig loose = parse_config(data + "/ricker.ini");
  REQUIRE(loose.warnings.size() == 1);
  CHECK(loose.warnings[0].find("(A)") != std::string::npos);
  CHECK_THROWS_AS(parse_config(data + "/ricker.ini", true), ConfigError);
  const auto v = violations_of("[harvest]\nrule = ricker\nr = 0.5\n", true);
  REQUIRE(v.size() == 1);
  CHECK(mentions(v, "hypothesis (A)"));
}

TEST_CASE("malformed values") {
  CHECK(mentions(violations_of("[coefficients]\nb = lots\n"), "coefficients.b"));
  CHECK(mentions(violations_of("[coefficients]\nb = -1\n"), "coefficient b"));
  CHECK(mentions(violations_of("[harvest]\nrule = cull\n"), "harvest.rule"));
  CHECK(mentions(violations_of("[harvest]\nc = 0\n"), "harvest"));
  CHECK(mentions(violations_of("[numerics]\nhorizon = 2.5\n"), "numerics.horizon"));
  CHECK(mentions(violations_of("[numerics]\nL1 = 0\n"), "L1/L2"));
  CHECK(mentions(violations_of("[numerics]\ndt = 0.5\n"), "stability"));
  CHECK(mentions(violations_of("[sweep]\nparameter = slope\n"), "grid is empty"));
  CHECK_THROWS_AS(parse_config(data + "/missing.ini"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("[kernel\nfamily = x\n"), ConfigError);
}

TEST_CASE("sweep section") {
  const RunConfig c = parse_config(data + "/sweep.ini");
  REQUIRE(c.sweep.has_value());
  CHECK(c.sweep->values.size() == 5);
  CHECK(c.sweep->threads == 3);
  CHECK(c.sweep->parameter == SweepParameter::Slope);
}

TEST_CASE("moving H'(0) keeps the rule family") {
  CHECK(with_slope(HarvestRule::linear(0.5), 0.3).slope0() == doctest::Approx(0.3));
  const HarvestRule bh = with_slope(HarvestRule::beverton_holt(1.0, 2.0), 0.8);
  CHECK(bh.slope0() == doctest::Approx(0.8));
  CHECK(std::holds_alternative<BevertonHoltHarvest>(bh.variant()));
  CHECK(with_slope(HarvestRule::ricker(-1.0, 1.0), 0.5).slope0() == doctest::Approx(0.5));
  CHECK_THROWS_AS(with_slope(HarvestRule::identity(), 0.0), ConfigError);
}
