#include "pulsefront/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pulsefront/eigen.hpp"
#include "pulsefront/errors.hpp"

namespace pulsefront {

namespace {

using Field = std::vector<std::vector<double>>;  // [time step][node]

double max_abs_diff(const Field& a, const Field& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t j = 0; j < a[k].size(); ++j) d = std::max(d, std::abs(a[k][j] - b[k][j]));
  }
  return d;
}

std::pair<double, double> field_range(const Field& a, const Field& b) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Field* f : {&a, &b}) {
    for (const auto& row : *f) {
      for (double v : row) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  return {lo, hi};
}

// One sweep of the shifted iteration: the next iterate W solves the linear
// problem with the reaction lagged at V; W(0+) comes from V(tau).
void sweep(const ModelParams& p, const Stencil& s1, const Stencil& s2, double dt, std::size_t S,
           double K1, double K2, const Field& V1, const Field& V2, Field& W1, Field& W2) {
  const auto& c = p.coeffs;
  const std::size_t N = V1[0].size();
  W1.assign(S + 1, std::vector<double>(N));
  W2.assign(S + 1, std::vector<double>(N));
  for (std::size_t j = 0; j < N; ++j) {
    W1[0][j] = V1[S][j];
    W2[0][j] = p.harvest.apply(V2[S][j]);
  }
  std::vector<double> conv1(N), conv2(N);
  for (std::size_t k = 0; k < S; ++k) {
    const double b = c.b.at_step(k, S), a = c.a.at_step(k, S);
    const double m1 = c.m1.at_step(k, S), m2 = c.m2.at_step(k, S);
    const double al1 = c.alpha1.at_step(k, S), al2 = c.alpha2.at_step(k, S);
    s1.convolve(W1[k], conv1);
    s2.convolve(W2[k], conv2);
    for (std::size_t j = 0; j < N; ++j) {
      const double v1 = V1[k][j], v2 = V2[k][j];
      const double g1 = b * v2 - (a + m1) * v1 - al1 * v1 * v1 + K1 * v1;
      const double g2 = a * v1 - m2 * v2 - al2 * v2 * v2 + K2 * v2;
      W1[k + 1][j] = W1[k][j] * (1.0 - dt * (c.d1 + K1)) + dt * (c.d1 * conv1[j] + g1);
      W2[k + 1][j] = W2[k][j] * (1.0 - dt * (c.d2 + K2)) + dt * (c.d2 * conv2[j] + g2);
    }
  }
}

// Lower seed from the discrete Euler eigenpair (lambda < 0):
//   U_i = eps e^{(lam+ups)(tau - t)} (phi, psi)(t) on (0, tau], eps (phi, psi)(0) at t = 0.
// The factor sits on both stages; with a constant factor on U1 the coupling
// term a U1 breaks the U2 inequality.
void lower_seed(const std::vector<std::vector<double>>& phi, const std::vector<std::vector<double>>& psi,
                const std::vector<double>& times, double lam, double tau, double eps, Field& V1,
                Field& V2) {
  const double ups = std::abs(lam) / 2.0;
  const double k = lam + ups;
  const std::size_t S = phi.size() - 1;
  V1.assign(S + 1, std::vector<double>(phi[0].size()));
  V2 = V1;
  for (std::size_t s = 0; s <= S; ++s) {
    const double f2 = eps * std::exp(k * (tau - times[s]));
    for (std::size_t j = 0; j < phi[s].size(); ++j) {
      V1[s][j] = f2 * phi[s][j];
      V2[s][j] = f2 * psi[s][j];
    }
  }
}

}  // namespace

double PeriodicSolution::sup_distance(const PeriodicSolution& other) const {
  if (U1.size() != other.U1.size() || U1.front().size() != other.U1.front().size()) {
    throw ConfigError("periodic solutions live on different grids");
  }
  return std::max(max_abs_diff(U1, other.U1), max_abs_diff(U2, other.U2));
}

std::pair<double, double> shift_constants(const Coefficients& c, double A) {
  return {c.a.sup() + c.m1.sup() + 2.0 * c.alpha1.sup() * A, c.m2.sup() + 2.0 * c.alpha2.sup() * A};
}

PeriodicSolution monotone_iteration(const ModelParams& p, double L1, double L2,
                                    const SimConfig& cfg, Direction dir,
                                    const MonotoneOptions& opt) {
  const Simulator sim(p, cfg.dx, cfg.dt);
  const FrontState grid = sim.initial_fixed(L1, L2);
  const std::size_t N = grid.size();
  const std::size_t S = sim.steps_per_period();
  const double tau = p.coeffs.tau;
  const double dt = cfg.dt;
  const double A = sim.bound();
  const auto [K1, K2] = shift_constants(p.coeffs, A);
  const Stencil s1(p.k1, cfg.dx), s2(p.k2, cfg.dx);

  PeriodicSolution sol;
  sol.kind = PeriodicKind::SpatialPeriodic;
  Field V1, V2, W1, W2;
  if (dir == Direction::FromUpper) {
    V1.assign(S + 1, std::vector<double>(N, A));
    V2 = V1;
  } else {
    EigenProblemSpec spec = make_eigen_spec(p, L1, L2, N - 1, S);
    const PerronResult pr = periodic_perron(spec, LinearPeriodMap::Scheme::Euler);
    const double lam = -std::log(pr.rho) / tau;
    sol.seed_lambda = lam;
    if (!(lam < 0.0)) {
      throw NumericalError(fmt::format("no positive lower seed: discrete lambda* = {} >= 0", lam));
    }
    const LinearPeriodMap map(spec, LinearPeriodMap::Scheme::Euler);
    std::vector<std::vector<double>> phi, psi;
    map.apply_history(pr.phi, pr.psi, phi, psi);
    // periodic eigenfunction: undo the e^{-lam t} growth of the linear flow
    std::vector<double> times(S + 1);
    double top = 0.0;
    for (std::size_t s = 0; s <= S; ++s) {
      times[s] = static_cast<double>(s) * dt;
      const double g = std::exp(lam * times[s]);
      for (std::size_t j = 0; j < N; ++j) {
        phi[s][j] *= g;
        psi[s][j] *= g;
        top = std::max({top, phi[s][j], psi[s][j]});
      }
    }
    for (std::size_t s = 0; s <= S; ++s) {
      for (std::size_t j = 0; j < N; ++j) {
        phi[s][j] /= top;
        psi[s][j] /= top;
      }
    }
    double eps = 1e-3 * A;
    bool ok = false;
    for (int halvings = 0; halvings <= 20 && !ok; ++halvings, eps *= 0.5) {
      lower_seed(phi, psi, times, lam, tau, eps, V1, V2);
      sweep(p, s1, s2, dt, S, K1, K2, V1, V2, W1, W2);
      ok = true;
      for (std::size_t s = 0; s <= S && ok; ++s) {
        for (std::size_t j = 0; j < N && ok; ++j) ok = W1[s][j] >= V1[s][j] && W2[s][j] >= V2[s][j];
      }
      if (ok) sol.seed_eps = eps;
    }
    if (!ok) throw NumericalError("no positive lower seed: seed is not a lower solution");
  }

  const double slack = 1e-12 * A;
  double prev_diff = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (sol.iterations = 0; sol.iterations < opt.max_iter;) {
    ++sol.iterations;
    sweep(p, s1, s2, dt, S, K1, K2, V1, V2, W1, W2);
    bool monotone = true;
    for (std::size_t s = 0; s <= S && monotone; ++s) {
      for (std::size_t j = 0; j < N && monotone; ++j) {
        if (dir == Direction::FromUpper) {
          monotone = W1[s][j] <= V1[s][j] + slack && W2[s][j] <= V2[s][j] + slack;
        } else {
          monotone = W1[s][j] >= V1[s][j] - slack && W2[s][j] >= V2[s][j] - slack;
        }
      }
    }
    if (!monotone) {
      throw NumericalError(fmt::format("monotone iteration lost monotonicity at sweep {}",
                                       sol.iterations));
    }
    const double diff = std::max(max_abs_diff(W1, V1), max_abs_diff(W2, V2));
    const auto [lo, hi] = field_range(W1, W2);
    sol.iterate_sup.push_back(hi);
    sol.iterate_min.push_back(lo);
    std::swap(V1, W1);
    std::swap(V2, W2);
    const double q = diff / prev_diff;
    prev_diff = diff;
    // stop only when the geometric tail estimate puts the iterate within
    // tol/2 of the limit, so the two one-sided limits can be compared at tol
    if (diff < opt.tol && q < 1.0 && diff * q / (1.0 - q) < 0.5 * opt.tol) {
      converged = true;
      break;
    }
    if (diff == 0.0) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NumericalError(fmt::format("monotone iteration did not converge in {} sweeps",
                                     sol.iterations),
                         prev_diff);
  }

  // report the orbit produced by one simulator period from the limit's
  // value at tau, so the pulse relation holds exactly
  FrontState st = sim.make_fixed(L1, L2, V1[S], V2[S]);
  sol.x.resize(N);
  for (std::size_t j = 0; j < N; ++j) sol.x[j] = st.x(j);
  sol.U1_pre = st.u1;
  sol.U2_pre = st.u2;
  st = sim.apply_pulse(st);
  sol.time.push_back(0.0);
  sol.U1.push_back(st.u1);
  sol.U2.push_back(st.u2);
  for (std::size_t k = 0; k < S; ++k) {
    st = sim.step_interior(st);
    sol.time.push_back(static_cast<double>(k + 1) * dt);
    sol.U1.push_back(st.u1);
    sol.U2.push_back(st.u2);
  }
  sol.time.back() = tau;
  double res = 0.0;
  for (std::size_t j = 0; j < N; ++j) {
    res = std::max({res, std::abs(st.u1[j] - sol.U1_pre[j]), std::abs(st.u2[j] - sol.U2_pre[j])});
  }
  sol.residual = res;
  return sol;
}

namespace {

std::vector<double> ode_cuts(const Coefficients& c, std::size_t samples) {
  std::vector<double> cuts;
  for (std::size_t k = 0; k <= samples; ++k) cuts.push_back(static_cast<double>(k) / static_cast<double>(samples));
  for (const PeriodicFunction* f : {&c.b, &c.a, &c.m1, &c.m2}) {
    const std::size_t n = f->slot_count();
    for (std::size_t k = 1; k < n; ++k) cuts.push_back(static_cast<double>(k) / static_cast<double>(n));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

PeriodicSolution ode_solution(PeriodicKind kind, const std::vector<double>& t,
                              const std::vector<std::array<double, 2>>& orbit,
                              std::array<double, 2> pre, double residual, std::size_t periods) {
  PeriodicSolution s;
  s.kind = kind;
  s.time = t;
  for (const auto& u : orbit) {
    s.U1.push_back({u[0]});
    s.U2.push_back({u[1]});
  }
  s.U1_pre = {pre[0]};
  s.U2_pre = {pre[1]};
  s.residual = residual;
  s.iterations = periods;
  return s;
}

}  // namespace

PeriodicSolution ode_periodic_linear(const Coefficients& c, const HarvestRule& rule,
                                     std::size_t samples) {
  c.validate();
  const double lam = ode_floquet_lambda(c, rule.slope0());
  if (!(lam < 0.0)) {
    throw NumericalError(fmt::format("hypothesis violated: lambda*(inf) = {} >= 0", lam));
  }
  const double tau = c.tau;
  const double Astar = std::max(c.b.sup() / (c.a.inf() + c.m1.inf()), c.a.sup() / c.m2.inf());
  const std::vector<double> cuts = ode_cuts(c, samples);
  std::vector<Mat2> props;  // exact propagator over each cut interval
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const double a = c.a.at_phase(mid);
    const Mat2 M{-a - c.m1.at_phase(mid), c.b.at_phase(mid), a, -c.m2.at_phase(mid)};
    props.push_back(expm2(M, (cuts[i + 1] - cuts[i]) * tau));
  }
  auto period = [&](std::array<double, 2> u, std::vector<std::array<double, 2>>* orbit,
                    std::vector<double>* times) {
    u[1] = rule.apply(u[1]);
    if (orbit) {
      orbit->assign(1, u);
      times->assign(1, 0.0);
    }
    for (std::size_t i = 0; i < props.size(); ++i) {
      const Mat2& P = props[i];
      u = {P[0] * u[0] + P[1] * u[1], P[2] * u[0] + P[3] * u[1]};
      if (orbit) {
        // keep only the uniform sample times
        const double s = cuts[i + 1] * static_cast<double>(samples);
        if (std::abs(s - std::round(s)) < 1e-9) {
          orbit->push_back(u);
          times->push_back(cuts[i + 1] * tau);
        }
      }
    }
    return u;
  };

  std::array<double, 2> u{Astar, Astar};
  std::vector<double> norms{std::max(u[0], u[1])};
  const std::size_t max_periods = 1000000;
  for (std::size_t n = 1; n <= max_periods; ++n) {
    const std::array<double, 2> next = period(u, nullptr, nullptr);
    const double change = std::max(std::abs(next[0] - u[0]), std::abs(next[1] - u[1]));
    u = next;
    norms.push_back(std::max(u[0], u[1]));
    if (n >= 10 && norms[n] > 2.0 * norms[n - 10]) {
      throw NumericalError("hypothesis violated: linear orbit norm doubled within 10 periods",
                           norms[n]);
    }
    if (change < 1e-10) {
      std::vector<std::array<double, 2>> orbit;
      std::vector<double> times;
      const auto end = period(u, &orbit, &times);
      const double res = std::max(std::abs(end[0] - u[0]), std::abs(end[1] - u[1]));
      return ode_solution(PeriodicKind::OdeLinear, times, orbit, u, res, n);
    }
  }
  throw NumericalError("linear orbit did not settle", norms.back());
}

PeriodicSolution ode_periodic_logistic(const Coefficients& c, const HarvestRule& rule,
                                       std::size_t samples) {
  c.validate();
  const double lam = ode_floquet_lambda(c, rule.slope0());
  if (!(lam < 0.0)) {
    throw NumericalError(fmt::format("positive orbit needs lambda*(inf) < 0, got {}", lam));
  }
  const double tau = c.tau;
  const double h = tau / static_cast<double>(samples);
  const double A = std::max(c.b.sup() / c.alpha1.inf(), c.a.sup() / c.alpha2.inf());

  auto f = [&](std::size_t k, const std::array<double, 2>& u) -> std::array<double, 2> {
    const double b = c.b.at_step(k, samples), a = c.a.at_step(k, samples);
    return {b * u[1] - (a + c.m1.at_step(k, samples)) * u[0] - c.alpha1.at_step(k, samples) * u[0] * u[0],
            a * u[0] - c.m2.at_step(k, samples) * u[1] - c.alpha2.at_step(k, samples) * u[1] * u[1]};
  };
  auto rk4 = [&](std::size_t k, const std::array<double, 2>& u) {
    const auto k1 = f(k, u);
    const auto k2 = f(k, {u[0] + 0.5 * h * k1[0], u[1] + 0.5 * h * k1[1]});
    const auto k3 = f(k, {u[0] + 0.5 * h * k2[0], u[1] + 0.5 * h * k2[1]});
    const auto k4 = f(k, {u[0] + h * k3[0], u[1] + h * k3[1]});
    return std::array<double, 2>{u[0] + h / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                                 u[1] + h / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
  };
  auto period = [&](std::array<double, 2> u, std::vector<std::array<double, 2>>* orbit) {
    u[1] = rule.apply(u[1]);
    if (orbit) orbit->assign(1, u);
    for (std::size_t k = 0; k < samples; ++k) {
      u = rk4(k, u);
      if (orbit) orbit->push_back(u);
    }
    return u;
  };

  std::array<double, 2> u{A, A};
  for (std::size_t n = 1; n <= 1000000; ++n) {
    const auto next = period(u, nullptr);
    const double change = std::max(std::abs(next[0] - u[0]), std::abs(next[1] - u[1]));
    u = next;
    if (change < 1e-13 * std::max(1.0, A)) {
      if (std::max(u[0], u[1]) < 1e-8) throw NumericalError("logistic attractor is zero");
      std::vector<std::array<double, 2>> orbit;
      const auto end = period(u, &orbit);
      std::vector<double> times(samples + 1);
      for (std::size_t k = 0; k <= samples; ++k) times[k] = static_cast<double>(k) * h;
      times.back() = tau;
      const double res = std::max(std::abs(end[0] - u[0]), std::abs(end[1] - u[1]));
      return ode_solution(PeriodicKind::OdeLogistic, times, orbit, u, res, n);
    }
  }
  throw NumericalError("logistic orbit did not settle");
}

std::pair<double, double> autonomous_equilibrium(const Coefficients& c) {
  if (!c.is_constant()) throw ConfigError("autonomous equilibrium needs constant coefficients");
  const double a = c.a.sup(), b = c.b.sup(), m1 = c.m1.sup(), m2 = c.m2.sup();
  const double al1 = c.alpha1.sup(), al2 = c.alpha2.sup();
  auto V = [&](double U) { return ((a + m1) * U + al1 * U * U) / b; };
  auto g = [&](double U) {
    const double v = V(U);
    return a * U - m2 * v - al2 * v * v;
  };
  if (!(a * b > m2 * (a + m1))) return {0.0, 0.0};
  double hi = std::max(b / al1, a / al2);
  while (g(hi) > 0.0) hi *= 2.0;
  // g > 0 just right of 0 and g(hi) <= 0
  double lo = hi * 1e-12;
  while (g(lo) <= 0.0 && lo < hi) lo *= 2.0;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  const double U = 0.5 * (lo + hi);
  return {U, V(U)};
}

}  // namespace pulsefront
