#include "pulsefront/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "pulsefront/errors.hpp"

namespace pulsefront {

namespace {

std::vector<double> node_positions(double left, double length, std::size_t n) {
  std::vector<double> x(n + 1);
  const double dx = length / static_cast<double>(n);
  for (std::size_t j = 0; j <= n; ++j) x[j] = left + static_cast<double>(j) * dx;
  return x;
}

void require_constant(const Coefficients& c, const char* what) {
  if (!c.is_constant()) {
    throw ConfigError(fmt::format("{} requires time-independent coefficients", what));
  }
}

// Perron root and eigenvector of a nonnegative 2x2 matrix
double perron2(const Mat2& G, std::array<double, 2>* right = nullptr,
               std::array<double, 2>* left = nullptr) {
  const double p = G[0], q = G[1], r = G[2], s = G[3];
  const double half = 0.5 * (p - s);
  const double rho = 0.5 * (p + s) + std::sqrt(half * half + q * r);
  if (right) {
    // (G - rho)v = 0; pick the better conditioned row
    if (q >= r) *right = {q, rho - p};
    else *right = {rho - s, r};
  }
  if (left) {
    if (r >= q) *left = {r, rho - p};
    else *left = {rho - s, q};
  }
  return rho;
}

}  // namespace

std::string_view to_string(EigenMethod m) {
  switch (m) {
    case EigenMethod::Power:
      return "power";
    case EigenMethod::ClosedForm:
      return "closed-form";
    case EigenMethod::Floquet:
      return "floquet";
    case EigenMethod::OdeFloquet:
      return "ode-floquet";
  }
  return "?";
}

void EigenProblemSpec::validate() const {
  std::vector<std::string> bad;
  if (!(length > 0.0) || !std::isfinite(length) || !std::isfinite(left)) {
    bad.push_back("eigen interval needs L1 < L2");
  }
  if (!(slope > 0.0) || !std::isfinite(slope)) bad.push_back("H'(0) must be positive");
  if (n < 8) bad.push_back("eigen grid needs n >= 8 cells");
  if (steps < 1) bad.push_back("eigen time grid needs >= 1 step per period");
  if (!bad.empty()) throw ConfigError(bad.front(), bad);
  coeffs.validate();
}

EigenProblemSpec make_eigen_spec(const ModelParams& p, double L1, double L2, std::size_t n,
                                 std::size_t steps) {
  EigenProblemSpec s;
  s.left = L1;
  s.length = L2 - L1;
  s.coeffs = p.coeffs;
  s.k1 = p.k1;
  s.k2 = p.k2;
  s.slope = p.harvest.slope0();
  s.n = n;
  s.steps = steps;
  return s;
}

EigenResult lambda0(const Kernel& k, double length, std::size_t n, double tol,
                    std::size_t max_iter) {
  if (!(length > 0.0)) throw ConfigError("lambda0 needs L > 0");
  if (n < 8) throw ConfigError("lambda0 needs n >= 8 cells");
  const Stencil st(k, length / static_cast<double>(n));
  const std::size_t nodes = n + 1;
  std::vector<double> v(nodes), w(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    v[j] = std::sin(std::numbers::pi * static_cast<double>(j + 1) / static_cast<double>(nodes + 1));
  }
  double rho = 0.0;
  double spread = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (it < max_iter) {
    ++it;
    st.convolve(v, w);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double top = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
      const double r = w[j] / v[j];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      top = std::max(top, w[j]);
    }
    if (!(lo > 0.0)) throw NumericalError("lambda0: iterate lost positivity");
    rho = 0.5 * (lo + hi);
    spread = (hi - lo) / rho;
    for (std::size_t j = 0; j < nodes; ++j) v[j] = w[j] / top;
    if (spread < tol) break;
  }
  if (!(spread < tol)) {
    throw NumericalError(fmt::format("lambda0: no convergence after {} iterations", it), spread);
  }
  EigenResult r;
  r.lambda = rho - 1.0;
  r.method = EigenMethod::Power;
  r.residual = spread * rho;
  r.n = n;
  r.iterations = it;
  r.x = node_positions(0.0, length, n);
  r.phi = std::move(v);
  r.lambda0 = r.lambda;
  return r;
}

std::pair<double, double> characteristic_roots(const Coefficients& c, double l1, double l2) {
  require_constant(c, "characteristic_roots");
  const double a = c.a.sup(), b = c.b.sup();
  const double M11 = c.d1 * l1 - a - c.m1.sup();
  const double M22 = c.d2 * l2 - c.m2.sup();
  const double half = 0.5 * (M11 - M22);
  const double root = std::sqrt(half * half + a * b);
  const double mid = 0.5 * (M11 + M22);
  return {mid + root, mid - root};
}

std::pair<double, double> characteristic_roots(const Coefficients& c, double lambda0) {
  return characteristic_roots(c, lambda0, lambda0);
}

EigenResult closed_form_from_lambda0(const Coefficients& c, double slope, double lam0,
                                     std::size_t samples) {
  require_constant(c, "closed_form_lambda");
  if (!(slope > 0.0) || slope > 1.0) throw ConfigError("closed form needs H'(0) in (0, 1]");
  const auto [c1, c2] = characteristic_roots(c, lam0);
  const double a = c.a.sup(), b = c.b.sup(), tau = c.tau;
  const double A12 = c1 - (c.d1 * lam0 - a - c.m1.sup());
  const double E = std::exp((c2 - c1) * tau);
  const double A11 = b, A13 = A12 * E, A21 = a, A22 = slope * a * E, A23 = slope * A12;

  auto curve1 = [&](double m) { return (A11 - A12 * m) / (A11 - A13 * m); };
  auto curve2 = [&](double m) { return (A21 * m + A12) / (A22 * m + A23); };
  auto f = [&](double m) { return curve1(m) - curve2(m); };

  // the admissible root lies in (-A12/a, 0]: beta > 0 on the period needs
  // A12 + a m > 0, and f > 0 at the left end while f(0) = 1 - 1/H'(0) <= 0
  const double mL = -A12 / a;
  std::vector<double> ms;
  for (int k = 0; k <= 160; ++k) ms.push_back(mL * std::pow(10.0, -0.1 * k) * (1.0 - 1e-14));
  ms.push_back(0.0);
  double lo = 0.0, hi = 0.0;
  double root = std::numeric_limits<double>::quiet_NaN();
  bool found = false;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double fi = f(ms[i]);
    if (fi == 0.0) {
      root = ms[i];
      found = true;
      break;
    }
    if (i > 0 && f(ms[i - 1]) > 0.0 && fi < 0.0) {
      lo = ms[i - 1];
      hi = ms[i];
      found = true;
      break;
    }
  }
  if (!found) {
    std::string msg = "closed form: no sign change of the curve difference; samples:";
    for (std::size_t i = 0; i < ms.size(); i += 20) msg += fmt::format(" f({:.3g})={:.3g}", ms[i], f(ms[i]));
    throw NumericalError(msg);
  }
  if (std::isnan(root)) {
    for (int it = 0; it < 400; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double fm = f(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      (fm > 0.0 ? lo : hi) = mid;
    }
    root = 0.5 * (lo + hi);
  }

  EigenResult r;
  r.method = EigenMethod::ClosedForm;
  r.m = root;
  r.Lambda = curve1(root);
  r.residual = std::abs(f(root));
  r.lambda0 = lam0;
  r.c1 = c1;
  r.c2 = c2;
  r.lambda = std::log(r.Lambda) / tau - c1;
  r.steps = samples;

  const double C = a * b + A12 * A12;
  const double mu1 = r.lambda + c1, mu2 = r.lambda + c2;
  r.time.resize(samples + 1);
  r.alpha.resize(samples + 1);
  r.beta.resize(samples + 1);
  for (std::size_t k = 0; k <= samples; ++k) {
    const double t = tau * static_cast<double>(k) / static_cast<double>(samples);
    const double e1 = std::exp(mu1 * t), e2 = std::exp(mu2 * t);
    r.time[k] = t;
    r.alpha[k] = (b * e1 - A12 * root * e2) / C;
    r.beta[k] = (A12 * e1 + a * root * e2) / C;
    if (!(r.alpha[k] > 0.0) || !(r.beta[k] > 0.0)) {
      throw NumericalError(fmt::format("closed form: time factor not positive at t={}", t));
    }
  }
  return r;
}

EigenResult closed_form_lambda(const EigenProblemSpec& spec) {
  spec.validate();
  require_constant(spec.coeffs, "closed_form_lambda");
  if (!(spec.k1 == spec.k2)) throw ConfigError("closed form needs identical kernels");
  const EigenResult l0 = lambda0(spec.k1, spec.length, spec.n);
  EigenResult r = closed_form_from_lambda0(spec.coeffs, spec.slope, l0.lambda, spec.steps);
  r.n = spec.n;
  r.x = node_positions(spec.left, spec.length, spec.n);
  r.phi.resize(l0.phi.size());
  r.psi.resize(l0.phi.size());
  const double beta0 = r.beta.back();  // beta(tau) = beta(0) before the pulse
  for (std::size_t j = 0; j < l0.phi.size(); ++j) {
    r.phi[j] = r.alpha.front() * l0.phi[j];
    r.psi[j] = beta0 * l0.phi[j];
  }
  return r;
}

LinearPeriodMap::LinearPeriodMap(const EigenProblemSpec& spec, Scheme scheme)
    : spec_(spec), scheme_(scheme), s1_(spec.k1, spec.dx()), s2_(spec.k2, spec.dx()),
      dt_(spec.coeffs.tau / static_cast<double>(spec.steps)) {
  spec_.validate();
}

void LinearPeriodMap::rhs(std::size_t k, const std::vector<double>& p, const std::vector<double>& q,
                          std::vector<double>& dp, std::vector<double>& dq) const {
  const auto& c = spec_.coeffs;
  const std::size_t S = spec_.steps;
  const double b = c.b.at_step(k, S), a = c.a.at_step(k, S);
  const double m1 = c.m1.at_step(k, S), m2 = c.m2.at_step(k, S);
  s1_.convolve(p, dp);
  s2_.convolve(q, dq);
  for (std::size_t j = 0; j < p.size(); ++j) {
    dp[j] = c.d1 * (dp[j] - p[j]) + b * q[j] - (a + m1) * p[j];
    dq[j] = c.d2 * (dq[j] - q[j]) + a * p[j] - m2 * q[j];
  }
}

void LinearPeriodMap::step(std::size_t k, std::vector<double>& p, std::vector<double>& q) const {
  const std::size_t N = p.size();
  const double h = dt_;
  std::vector<double> k1p(N), k1q(N);
  rhs(k, p, q, k1p, k1q);
  if (scheme_ == Scheme::Euler) {
    for (std::size_t j = 0; j < N; ++j) {
      p[j] += h * k1p[j];
      q[j] += h * k1q[j];
    }
    return;
  }
  std::vector<double> tp(N), tq(N), k2p(N), k2q(N), k3p(N), k3q(N), k4p(N), k4q(N);
  for (std::size_t j = 0; j < N; ++j) {
    tp[j] = p[j] + 0.5 * h * k1p[j];
    tq[j] = q[j] + 0.5 * h * k1q[j];
  }
  rhs(k, tp, tq, k2p, k2q);
  for (std::size_t j = 0; j < N; ++j) {
    tp[j] = p[j] + 0.5 * h * k2p[j];
    tq[j] = q[j] + 0.5 * h * k2q[j];
  }
  rhs(k, tp, tq, k3p, k3q);
  for (std::size_t j = 0; j < N; ++j) {
    tp[j] = p[j] + h * k3p[j];
    tq[j] = q[j] + h * k3q[j];
  }
  rhs(k, tp, tq, k4p, k4q);
  for (std::size_t j = 0; j < N; ++j) {
    p[j] += h / 6.0 * (k1p[j] + 2.0 * k2p[j] + 2.0 * k3p[j] + k4p[j]);
    q[j] += h / 6.0 * (k1q[j] + 2.0 * k2q[j] + 2.0 * k3q[j] + k4q[j]);
  }
}

void LinearPeriodMap::apply(std::vector<double>& phi, std::vector<double>& psi) const {
  for (double& v : psi) v *= spec_.slope;
  for (std::size_t k = 0; k < spec_.steps; ++k) step(k, phi, psi);
}

void LinearPeriodMap::apply_history(const std::vector<double>& phi, const std::vector<double>& psi,
                                    std::vector<std::vector<double>>& phi_t,
                                    std::vector<std::vector<double>>& psi_t) const {
  std::vector<double> p = phi, q = psi;
  for (double& v : q) v *= spec_.slope;
  phi_t.assign(1, p);
  psi_t.assign(1, q);
  for (std::size_t k = 0; k < spec_.steps; ++k) {
    step(k, p, q);
    phi_t.push_back(p);
    psi_t.push_back(q);
  }
}

PerronResult perron(const LinearPeriodMap& map, double tol, std::size_t max_iter,
                    const std::vector<double>* phi0, const std::vector<double>* psi0) {
  const std::size_t N = map.nodes();
  PerronResult r;
  r.phi = phi0 && phi0->size() == N ? *phi0 : std::vector<double>(N, 1.0);
  r.psi = psi0 && psi0->size() == N ? *psi0 : std::vector<double>(N, 1.0);
  std::vector<double> p, q;
  r.spread = std::numeric_limits<double>::infinity();
  for (r.iterations = 0; r.iterations < max_iter;) {
    ++r.iterations;
    p = r.phi;
    q = r.psi;
    map.apply(p, q);
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double top = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      const double ra = p[j] / r.phi[j];
      const double rb = q[j] / r.psi[j];
      lo = std::min({lo, ra, rb});
      hi = std::max({hi, ra, rb});
      top = std::max({top, p[j], q[j]});
    }
    if (!(lo > 0.0)) throw NumericalError("monodromy iterate lost positivity");
    r.ratio_min = lo;
    r.ratio_max = hi;
    r.rho = 0.5 * (lo + hi);
    r.spread = (hi - lo) / r.rho;
    for (std::size_t j = 0; j < N; ++j) {
      r.phi[j] = p[j] / top;
      r.psi[j] = q[j] / top;
    }
    if (r.spread < tol) return r;
  }
  throw NumericalError(fmt::format("monodromy power iteration stagnated after {} iterations",
                                   r.iterations),
                       r.spread);
}

// Spatial Perron vectors of the two dispersal operators: with equal kernels
// they are exact spatial factors of the periodic eigenfunction, otherwise a
// good start. Falls back to the all-ones pair.
std::pair<std::vector<double>, std::vector<double>> warm_start(const EigenProblemSpec& spec) {
  try {
    std::vector<double> p = lambda0(spec.k1, spec.length, spec.n, 1e-10).phi;
    std::vector<double> q = spec.k1 == spec.k2 ? p : lambda0(spec.k2, spec.length, spec.n, 1e-10).phi;
    return {std::move(p), std::move(q)};
  } catch (const NumericalError&) {
    return {};
  }
}

PerronResult periodic_perron(const EigenProblemSpec& spec, LinearPeriodMap::Scheme scheme) {
  const LinearPeriodMap map(spec, scheme);
  const auto [p0, q0] = warm_start(spec);
  return perron(map, spec.tol, spec.max_iter, &p0, &q0);
}

EigenResult floquet_lambda(const EigenProblemSpec& spec) {
  spec.validate();
  const PerronResult pr = periodic_perron(spec, LinearPeriodMap::Scheme::RK4);
  EigenResult r;
  r.method = EigenMethod::Floquet;
  r.lambda = -std::log(pr.rho) / spec.coeffs.tau;
  r.residual = pr.spread / spec.coeffs.tau;
  r.n = spec.n;
  r.steps = spec.steps;
  r.iterations = pr.iterations;
  r.surrogate = !(spec.k1 == spec.k2);
  r.x = node_positions(spec.left, spec.length, spec.n);
  r.phi = pr.phi;
  r.psi = pr.psi;
  return r;
}

double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

GeneralizedBracket generalized_bracket(const EigenProblemSpec& spec) {
  spec.validate();
  require_constant(spec.coeffs, "generalized_bracket");
  const PerronResult pr = periodic_perron(spec, LinearPeriodMap::Scheme::RK4);
  const double tau = spec.coeffs.tau;
  GeneralizedBracket g;
  // with e^{lambda tau} G v compared to v: the test pair is a super-solution
  // for lambda up to -ln(min ratio)/tau and a sub-solution from -ln(max ratio)/tau
  g.upper = -std::log(pr.ratio_min) / tau;
  g.lower = -std::log(pr.ratio_max) / tau;
  g.surrogate = -std::log(pr.rho) / tau;
  const auto& c = spec.coeffs;
  const double span = c.d1 + c.d2 + c.a.sup() + c.b.sup() + c.m1.sup() + c.m2.sup();
  if (std::abs(g.upper) > span || std::abs(g.lower) > span) {
    throw NumericalError(fmt::format("bracket [{}, {}] outside [-{}, {}]", g.lower, g.upper, span, span));
  }
  g.witness = fmt::format("discrete Perron pair, n={}, steps={}, ratio spread={:.3g}", spec.n,
                          spec.steps, pr.spread);
  return g;
}

Mat2 mul2(const Mat2& A, const Mat2& B) {
  return {A[0] * B[0] + A[1] * B[2], A[0] * B[1] + A[1] * B[3],
          A[2] * B[0] + A[3] * B[2], A[2] * B[1] + A[3] * B[3]};
}

Mat2 expm2(const Mat2& M, double t) {
  const double mid = 0.5 * (M[0] + M[3]);
  const double half = 0.5 * (M[0] - M[3]);
  const double disc = half * half + M[1] * M[2];
  if (!(disc > 0.0)) throw NumericalError("expm2 needs distinct real eigenvalues");
  const double root = std::sqrt(disc);
  const double l1 = mid + root, l2 = mid - root;
  const double e1 = std::exp(l1 * t), e2 = std::exp(l2 * t);
  const double den = l1 - l2;
  // Putzer: [e1 (M - l2 I) - e2 (M - l1 I)] / (l1 - l2)
  return {(e1 * (M[0] - l2) - e2 * (M[0] - l1)) / den, (e1 - e2) * M[1] / den,
          (e1 - e2) * M[2] / den, (e1 * (M[3] - l2) - e2 * (M[3] - l1)) / den};
}

double ode_floquet_lambda(const Coefficients& c, double slope, double l1, double l2) {
  c.validate();
  if (!(slope > 0.0)) throw ConfigError("H'(0) must be positive");
  std::vector<double> cuts{0.0, 1.0};
  for (const PeriodicFunction* f : {&c.b, &c.a, &c.m1, &c.m2}) {
    const std::size_t n = f->slot_count();
    for (std::size_t k = 1; k < n; ++k) cuts.push_back(static_cast<double>(k) / static_cast<double>(n));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  Mat2 G{1.0, 0.0, 0.0, slope};  // pulse first
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const double a = c.a.at_phase(mid), b = c.b.at_phase(mid);
    const Mat2 M{c.d1 * l1 - a - c.m1.at_phase(mid), b, a, c.d2 * l2 - c.m2.at_phase(mid)};
    G = mul2(expm2(M, (cuts[i + 1] - cuts[i]) * c.tau), G);
  }
  return -std::log(perron2(G)) / c.tau;
}

double lambda_sensitivity(const EigenProblemSpec& spec) {
  spec.validate();
  require_constant(spec.coeffs, "lambda_sensitivity");
  if (!(spec.k1 == spec.k2)) throw ConfigError("lambda_sensitivity needs identical kernels");
  const auto& c = spec.coeffs;
  const double h = spec.slope;
  const double lam0 = lambda0(spec.k1, spec.length, spec.n).lambda;
  const double tau = c.tau;
  const double a = c.a.sup(), b = c.b.sup();
  const Mat2 M{c.d1 * lam0 - a - c.m1.sup(), b, a, c.d2 * lam0 - c.m2.sup()};
  const Mat2 G = mul2(expm2(M, tau), Mat2{1.0, 0.0, 0.0, h});
  std::array<double, 2> x{}, y{};
  const double rho = perron2(G, &x, &y);
  const double lam = -std::log(rho) / tau;
  const double sx = std::max(x[0], x[1]), sy = std::max(y[0], y[1]);
  x = {x[0] / sx, x[1] / sx};
  y = {y[0] / sy, y[1] / sy};

  // (alpha, beta)(t) = e^{(M+lam)t} P x on (0, tau]; the adjoint runs
  // backward from (alpha*, beta*)(tau) = y with the 1/H'(0) pulse
  auto integrand = [&](double t) {
    const Mat2 F = expm2(M, t);
    const double g = std::exp(lam * t);
    const double w1 = g * (F[0] * x[0] + F[1] * h * x[1]);
    const double w2 = g * (F[2] * x[0] + F[3] * h * x[1]);
    const Mat2 B = expm2(M, tau - t);
    const double gb = std::exp(lam * (tau - t));
    const double z1 = gb * (B[0] * y[0] + B[2] * y[1]);
    const double z2 = gb * (B[1] * y[0] + B[3] * y[1]);
    return w1 * z1 + w2 * z2;
  };
  const int panels = 512;  // composite Simpson
  const double dt = tau / panels;
  double acc = integrand(0.0) + integrand(tau);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * integrand(i * dt);
  const double denom = acc * dt / 3.0;
  if (!(std::abs(denom) > 1e-12)) throw NumericalError("sensitivity: degenerate denominator", denom);
  const double beta0 = x[1];       // beta(0), before the pulse
  const double beta0_star = y[1];  // beta*(0)
  return -(1.0 / h) * beta0 * beta0_star / denom;
}

EigenProblemSpec translate_interval(const EigenProblemSpec& spec, double shift) {
  EigenProblemSpec s = spec;
  s.left += shift;
  return s;
}

}  // namespace pulsefront
