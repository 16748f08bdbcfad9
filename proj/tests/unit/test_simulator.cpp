#include <cmath>
#include <map>

#include <doctest.h>

#include "pulsefront/errors.hpp"
#include "pulsefront/simulator.hpp"

using namespace pulsefront;

namespace {

ModelParams base() {
  ModelParams p;
  p.coeffs.b = 4.0;
  p.harvest = HarvestRule::linear(0.5);
  p.frontier = {0.5, 0.5, 1.0};
  p.initial = InitialData::bump(1.0, 0.5, 0.5);
  return p;
}

SimConfig quick(std::size_t periods) {
  SimConfig c;
  c.dx = 0.05;
  c.dt = 0.02;
  c.horizon = periods;
  c.record_stride = 5;
  return c;
}

// global node index -> value
std::map<std::int64_t, double> by_node(const FrontState& s, const std::vector<double>& u) {
  std::map<std::int64_t, double> m;
  for (std::size_t j = 0; j < s.size(); ++j) m[s.first + static_cast<std::int64_t>(j)] = u[j];
  return m;
}

}  // namespace

TEST_CASE("time step must divide the period and be stable") {
  const ModelParams p = base();
  CHECK_THROWS_AS(Simulator(p, 0.05, 0.03), ConfigError);
  CHECK_THROWS_AS(Simulator(p, 0.05, 0.5), ConfigError);
  const Simulator s(p, 0.05, 0.02);
  CHECK(s.steps_per_period() == 50);
  CHECK(s.bound() == 4.0);
  // 1 / (1 + 1 + 1 + 1 + 4 + 2*4)
  CHECK(s.max_stable_dt() == doctest::Approx(1.0 / 16.0));
  CHECK(stable_dt(p, 0.05) == s.max_stable_dt());
}

TEST_CASE("pulse is applied exactly at period boundaries") {
  const ModelParams p = base();
  const Trajectory tr = run_free(p, quick(3));
  std::size_t pairs = 0;
  for (std::size_t i = 0; i + 1 < tr.snapshots.size(); ++i) {
    const Snapshot& pre = tr.snapshots[i];
    const Snapshot& post = tr.snapshots[i + 1];
    if (pre.phase != PulsePhase::PrePulse || post.phase != PulsePhase::PostPulse) continue;
    REQUIRE(pre.period == post.period);
    REQUIRE(pre.state.size() == post.state.size());
    for (std::size_t j = 0; j < pre.state.size(); ++j) {
      CHECK(post.state.u2[j] == 0.5 * pre.state.u2[j]);
      CHECK(post.state.u1[j] == pre.state.u1[j]);
    }
    ++pairs;
  }
  CHECK(pairs == 3);

  const Simulator sim(p, 0.05, 0.02);
  FrontState s = sim.initial_free();
  s = sim.step_free(s);
  CHECK_THROWS_AS(sim.apply_pulse(s), NumericalError);
}

TEST_CASE("free run with zero expansion capacity equals the fixed run") {
  ModelParams p = base();
  p.frontier.mu1 = p.frontier.mu2 = 0.0;
  const Trajectory free = run_free(p, quick(4));
  const Trajectory fixed = run_fixed(p, -1.0, 1.0, quick(4));
  CHECK(free.final_state.g == -1.0);
  CHECK(free.final_state.h == 1.0);
  REQUIRE(free.final_state.size() == fixed.final_state.size());
  for (std::size_t j = 0; j < free.final_state.size(); ++j) {
    CHECK(free.final_state.u1[j] == doctest::Approx(fixed.final_state.u1[j]).epsilon(1e-13));
    CHECK(free.final_state.u2[j] == doctest::Approx(fixed.final_state.u2[j]).epsilon(1e-13));
  }
}

TEST_CASE("fronts move outward and stay symmetric for even data") {
  const Trajectory tr = run_free(base(), quick(5));
  double g = tr.records.front().g, h = tr.records.front().h;
  for (const Record& r : tr.records) {
    CHECK(r.h >= h);
    CHECK(r.g <= g);
    CHECK(r.g == doctest::Approx(-r.h).epsilon(1e-12));
    CHECK(r.min_u >= 0.0);
    CHECK(r.max1 <= 4.0);
    g = r.g;
    h = r.h;
  }
  CHECK(tr.records.back().h > 1.0);
  const AuditReport a = audit_trajectory(tr, base().harvest);
  CHECK(a.frames > 0);
  CHECK(a.violations() == 0);
}

TEST_CASE("ordered initial data stay ordered") {
  ModelParams lo = base(), hi = base();
  lo.initial = InitialData::bump(1.0, 0.2, 0.3);
  hi.initial = InitialData::bump(1.0, 0.6, 0.4);
  const Trajectory a = run_free(lo, quick(5));
  const Trajectory b = run_free(hi, quick(5));
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    const FrontState& sa = a.snapshots[k].state;
    const FrontState& sb = b.snapshots[k].state;
    CHECK(sa.h <= sb.h);
    CHECK(sa.g >= sb.g);
    const auto a1 = by_node(sa, sa.u1), b1 = by_node(sb, sb.u1);
    const auto a2 = by_node(sa, sa.u2), b2 = by_node(sb, sb.u2);
    for (const auto& [node, v] : a1) {
      REQUIRE(b1.count(node) == 1);
      CHECK(v <= b1.at(node));
      CHECK(a2.at(node) <= b2.at(node));
    }
  }
}

TEST_CASE("zero data stay zero") {
  ModelParams p = base();
  p.initial = InitialData::bump(1.0, 0.0, 0.0);
  const Trajectory tr = run_free(p, quick(5));
  CHECK(tr.final_state.h == 1.0);
  for (double v : tr.final_state.u1) CHECK(v == 0.0);
  CHECK(tr.periods() == 5);
}

TEST_CASE("fixed domain needs whole cells") {
  CHECK_THROWS_AS(run_fixed(base(), -1.0, 1.01, quick(1)), ConfigError);
}
