#include "pulsefront/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pulsefront/errors.hpp"

namespace pulsefront {

namespace {

double trapezoid_mass(const std::vector<double>& u, double dx) {
  const std::size_t n = u.size();
  if (n < 2) return 0.0;
  double acc = 0.5 * (u.front() + u.back());
  for (std::size_t j = 1; j + 1 < n; ++j) acc += u[j];
  return acc * dx;
}

double node_weight(std::size_t j, std::size_t n, double dx) {
  return (j == 0 || j + 1 == n) ? 0.5 * dx : dx;
}

}  // namespace

std::size_t Trajectory::periods() const {
  return static_cast<std::size_t>(std::llround(final_state.t / tau));
}

Simulator::Simulator(const ModelParams& params, double dx, double dt)
    : p_(params), dx_(dx), dt_(dt), steps_(0), A_(a_priori_bound(params)),
      s1_(params.k1, dx), s2_(params.k2, dx) {
  p_.coeffs.validate();
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  const double ratio = p_.coeffs.tau / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ConfigError(fmt::format("tau/dt must be an integer (tau={}, dt={})", p_.coeffs.tau, dt));
  }
  steps_ = static_cast<std::size_t>(rounded);
  if (p_.frontier.mu1 < 0.0 || p_.frontier.mu2 < 0.0) throw ConfigError("mu must be >= 0");
  check_stability();
}

double stable_dt(const ModelParams& p, double dx) {
  const auto& c = p.coeffs;
  const double A = a_priori_bound(p);
  const double rate = std::max(c.d1, c.d2) + c.a.sup() + c.m1.sup() + c.m2.sup() + c.b.sup() +
                      2.0 * std::max(c.alpha1.sup(), c.alpha2.sup()) * A;
  double dt = 1.0 / rate;
  const double mu = p.frontier.mu_total();
  if (mu > 0.0) {
    // keeps the front update monotone in the front position
    const double peak = std::max(p.k1.peak(), p.k2.peak());
    dt = std::min(dt, 1.0 / (mu * A * (1.0 + dx * peak)));
  }
  return dt;
}

double Simulator::max_stable_dt() const { return stable_dt(p_, dx_); }

void Simulator::check_stability() const {
  const double lim = max_stable_dt();
  if (dt_ > lim * (1.0 + 1e-12)) {
    throw ConfigError(fmt::format("dt={} violates the stability constraint dt <= {}", dt_, lim));
  }
}

FrontState Simulator::initial_free() const {
  const double h0 = p_.frontier.h0;
  const auto jr = static_cast<std::int64_t>(std::floor(h0 / dx_ + 1e-9));
  FrontState s;
  s.g = -h0;
  s.h = h0;
  s.origin = 0.0;
  s.dx = dx_;
  s.first = -jr;
  const auto n = static_cast<std::size_t>(2 * jr + 1);
  s.u1.resize(n);
  s.u2.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = s.x(j);
    s.u1[j] = p_.initial.u1(x);
    s.u2[j] = p_.initial.u2(x);
  }
  return s;
}

FrontState Simulator::make_fixed(double L1, double L2, std::vector<double> u1,
                                 std::vector<double> u2) const {
  if (!(L2 > L1)) throw ConfigError("fixed interval needs L1 < L2");
  const double cells = (L2 - L1) / dx_;
  const double rc = std::round(cells);
  if (rc < 1.0 || std::abs(cells - rc) > 1e-9 * std::max(1.0, cells)) {
    throw ConfigError(fmt::format("(L2-L1)/dx must be an integer (L={}, dx={})", L2 - L1, dx_));
  }
  const auto n = static_cast<std::size_t>(rc) + 1;
  if (u1.size() != n || u2.size() != n) throw ConfigError("fixed state has wrong node count");
  FrontState s;
  s.g = L1;
  s.h = L2;
  s.origin = L1;
  s.dx = dx_;
  s.first = 0;
  s.u1 = std::move(u1);
  s.u2 = std::move(u2);
  return s;
}

FrontState Simulator::initial_fixed(double L1, double L2) const {
  const auto n = static_cast<std::size_t>(std::llround((L2 - L1) / dx_)) + 1;
  std::vector<double> u1(n), u2(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = L1 + static_cast<double>(j) * dx_;
    u1[j] = p_.initial.u1(x);
    u2[j] = p_.initial.u2(x);
  }
  return make_fixed(L1, L2, std::move(u1), std::move(u2));
}

FrontState Simulator::step_interior(const FrontState& s) const {
  const auto& c = p_.coeffs;
  const std::size_t k = s.step % steps_;
  const double b = c.b.at_step(k, steps_);
  const double a = c.a.at_step(k, steps_);
  const double m1 = c.m1.at_step(k, steps_);
  const double m2 = c.m2.at_step(k, steps_);
  const double al1 = c.alpha1.at_step(k, steps_);
  const double al2 = c.alpha2.at_step(k, steps_);
  const double dt = dt_;

  const std::size_t n = s.size();
  std::vector<double> conv1(n), conv2(n);
  s1_.convolve(s.u1, conv1);
  s2_.convolve(s.u2, conv2);

  FrontState out = s;
  for (std::size_t j = 0; j < n; ++j) {
    const double v1 = s.u1[j];
    const double v2 = s.u2[j];
    // written so every coefficient multiplying a density is >= 0
    out.u1[j] = v1 * (1.0 - dt * (c.d1 + a + m1 + al1 * v1)) + dt * (c.d1 * conv1[j] + b * v2);
    out.u2[j] = v2 * (1.0 - dt * (c.d2 + m2 + al2 * v2)) + dt * (c.d2 * conv2[j] + a * v1);
  }
  out.step = s.step + 1;
  out.t = static_cast<double>(out.step / steps_) * c.tau +
          static_cast<double>(out.step % steps_) * dt_;
  return out;
}

FrontState Simulator::apply_pulse(const FrontState& s) const {
  const double tau = p_.coeffs.tau;
  if (std::abs(std::remainder(s.t, tau)) > 1e-9 * tau) {
    throw NumericalError(fmt::format("pulse applied off schedule at t={}", s.t));
  }
  FrontState out = s;
  for (double& v : out.u2) v = p_.harvest.apply(v);
  return out;
}

std::pair<double, double> Simulator::step_boundaries(const FrontState& s) const {
  const double mu1 = p_.frontier.mu1;
  const double mu2 = p_.frontier.mu2;
  if (mu1 + mu2 == 0.0 || s.size() == 0) return {s.g, s.h};
  const std::size_t n = s.size();
  const double reach = std::max(p_.k1.support(), p_.k2.support());

  double right = 0.0;
  for (std::size_t jj = n; jj-- > 0;) {
    const double d = s.h - s.x(jj);
    if (d >= reach) break;
    const double w = node_weight(jj, n, dx_);
    right += w * (mu1 * s.u1[jj] * p_.k1.tail(d) + mu2 * s.u2[jj] * p_.k2.tail(d));
  }
  double left = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = s.x(j) - s.g;
    if (d >= reach) break;
    const double w = node_weight(j, n, dx_);
    left += w * (mu1 * s.u1[j] * p_.k1.tail(d) + mu2 * s.u2[j] * p_.k2.tail(d));
  }
  return {s.g - dt_ * left, s.h + dt_ * right};
}

FrontState Simulator::step_free(const FrontState& s) const {
  const auto [g, h] = step_boundaries(s);
  FrontState out = step_interior(s);
  out.g = g;
  out.h = h;
  // activate every node the continuous fronts have passed, density 0
  while (out.x(out.size() - 1) + dx_ <= h) {
    out.u1.push_back(0.0);
    out.u2.push_back(0.0);
  }
  std::size_t added = 0;
  while (out.origin + static_cast<double>(out.first - 1) * dx_ >= g) {
    --out.first;
    ++added;
  }
  if (added > 0) {
    out.u1.insert(out.u1.begin(), added, 0.0);
    out.u2.insert(out.u2.begin(), added, 0.0);
  }
  return out;
}

namespace {

Record make_record(const FrontState& s, double core_lo, double core_hi) {
  Record r{};
  r.t = s.t;
  r.g = s.g;
  r.h = s.h;
  r.mass1 = trapezoid_mass(s.u1, s.dx);
  r.mass2 = trapezoid_mass(s.u2, s.dx);
  r.max1 = s.u1.empty() ? 0.0 : *std::max_element(s.u1.begin(), s.u1.end());
  r.max2 = s.u2.empty() ? 0.0 : *std::max_element(s.u2.begin(), s.u2.end());
  r.min_u = std::numeric_limits<double>::infinity();
  r.core_min = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double m = std::min(s.u1[j], s.u2[j]);
    r.min_u = std::min(r.min_u, m);
    const double x = s.x(j);
    if (x >= core_lo && x <= core_hi) r.core_min = std::min(r.core_min, m);
  }
  return r;
}

Trajectory run(const Simulator& sim, FrontState state, bool fixed, const SimConfig& cfg) {
  const auto& p = sim.params();
  const double h0 = p.frontier.h0;
  Trajectory traj;
  traj.tau = p.coeffs.tau;
  traj.bound = sim.bound();
  traj.h0 = h0;
  traj.fixed = fixed;
  traj.core_lo = cfg.tolerances.core_lo.value_or(-0.5 * h0);
  traj.core_hi = cfg.tolerances.core_hi.value_or(0.5 * h0);
  const std::size_t stride = std::max<std::size_t>(1, cfg.record_stride);
  const std::size_t steps = sim.steps_per_period();

  traj.records.push_back(make_record(state, traj.core_lo, traj.core_hi));
  for (std::size_t n = 0; n < cfg.horizon; ++n) {
    if (cfg.keep_snapshots) traj.snapshots.push_back({n, PulsePhase::PrePulse, state});
    state = sim.apply_pulse(state);
    if (cfg.keep_snapshots) traj.snapshots.push_back({n, PulsePhase::PostPulse, state});
    for (std::size_t k = 0; k < steps; ++k) {
      state = fixed ? sim.step_interior(state) : sim.step_free(state);
      if (k + 1 == steps || state.step % stride == 0) {
        traj.records.push_back(make_record(state, traj.core_lo, traj.core_hi));
      }
    }
  }
  if (cfg.keep_snapshots) traj.snapshots.push_back({cfg.horizon, PulsePhase::PrePulse, state});
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace

Trajectory run_free(const ModelParams& params, const SimConfig& cfg) {
  Simulator sim(params, cfg.dx, cfg.dt);
  return run(sim, sim.initial_free(), false, cfg);
}

Trajectory run_fixed(const ModelParams& params, double L1, double L2, const SimConfig& cfg) {
  Simulator sim(params, cfg.dx, cfg.dt);
  return run(sim, sim.initial_fixed(L1, L2), true, cfg);
}

Trajectory run_fixed_from(const ModelParams& params, double L1, double L2,
                          std::vector<double> u1, std::vector<double> u2, const SimConfig& cfg) {
  Simulator sim(params, cfg.dx, cfg.dt);
  return run(sim, sim.make_fixed(L1, L2, std::move(u1), std::move(u2)), true, cfg);
}

AuditReport audit_trajectory(const Trajectory& traj, const HarvestRule& rule) {
  AuditReport rep;
  const double A = traj.bound + 1e-12;
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const Record& r = traj.records[i];
    ++rep.frames;
    if (r.min_u < 0.0) ++rep.positivity;
    if (r.max1 > A || r.max2 > A) ++rep.bound;
    if (i > 0) {
      const Record& q = traj.records[i - 1];
      if (!(r.t > q.t)) ++rep.time_order;
      if (r.h < q.h || r.g > q.g) ++rep.front;
    }
  }
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const Snapshot& sn = traj.snapshots[i];
    const auto& s = sn.state;
    ++rep.frames;
    bool neg = false;
    bool over = false;
    for (std::size_t j = 0; j < s.size(); ++j) {
      neg = neg || s.u1[j] < 0.0 || s.u2[j] < 0.0;
      over = over || s.u1[j] > A || s.u2[j] > A;
    }
    rep.positivity += neg;
    rep.bound += over;
    if (sn.phase != PulsePhase::PostPulse) continue;
    if (i == 0 || traj.snapshots[i - 1].phase != PulsePhase::PrePulse ||
        traj.snapshots[i - 1].period != sn.period) {
      ++rep.pulse;
      continue;
    }
    const auto& pre = traj.snapshots[i - 1].state;
    bool exact = pre.size() == s.size() && pre.t == s.t;
    for (std::size_t j = 0; exact && j < s.size(); ++j) {
      exact = s.u1[j] == pre.u1[j] && s.u2[j] == rule.apply(pre.u2[j]);
    }
    if (!exact) ++rep.pulse;
  }
  return rep;
}

}  // namespace pulsefront
