#include "pulsefront/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "pulsefront/eigen.hpp"
#include "pulsefront/errors.hpp"

namespace pulsefront {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Spreading:
      return "spreading";
    case Outcome::Vanishing:
      return "vanishing";
    case Outcome::Undetermined:
      return "undetermined";
  }
  return "?";
}

std::string_view to_string(Prediction p) {
  switch (p) {
    case Prediction::Spreading:
      return "spreading";
    case Prediction::Vanishing:
      return "vanishing";
    case Prediction::Conditional:
      return "conditional";
    case Prediction::ConditionalSpreading:
      return "conditional-spreading";
    case Prediction::Undetermined:
      return "undetermined";
  }
  return "?";
}

ResolvedTolerances resolve(const ClassifyTolerances& t, double A, double h0) {
  return {t.eps_vanish.value_or(1e-5 * A), t.eps_front, t.l_spread.value_or(10.0 * h0),
          t.delta.value_or(1e-3 * A)};
}

Verdict classify_trajectory(const Trajectory& traj, const ClassifyTolerances& tol) {
  Verdict v;
  v.horizon = traj.periods();
  if (traj.records.empty() || v.horizon < 5) {
    v.reason = "trajectory spans fewer than 5 periods";
    return v;
  }
  const ResolvedTolerances r = resolve(tol, traj.bound, traj.h0);
  const Record& last = traj.records.back();
  const double t_end = last.t;
  const double t_start = t_end - traj.tau;
  const double t_prev = t_start - traj.tau;

  // records of the last period, including its starting record
  const Record* first = nullptr;
  const Record* prev_first = nullptr;
  double sup_last = 0.0, sup_prev = 0.0;
  double core = std::numeric_limits<double>::infinity();
  const double slack = 1e-9 * traj.tau;
  for (const Record& rec : traj.records) {
    if (rec.t >= t_start - slack) {
      if (!first) first = &rec;
      sup_last = std::max({sup_last, rec.max1, rec.max2});
      core = std::min(core, rec.core_min);
    } else if (rec.t >= t_prev - slack) {
      if (!prev_first) prev_first = &rec;
      sup_prev = std::max({sup_prev, rec.max1, rec.max2});
    }
  }
  Evidence& e = v.evidence;
  e.final_width = last.h - last.g;
  e.final_sup = sup_last;
  e.front_advance = (last.h - last.g) - (first->h - first->g);
  e.core_min = std::isfinite(core) ? core : 0.0;
  e.width_slope = e.front_advance / traj.tau;
  e.log_sup_slope = (sup_last > 0.0 && sup_prev > 0.0) ? std::log(sup_last / sup_prev) : 0.0;

  if (e.final_width >= r.l_spread && e.core_min >= r.delta) {
    v.outcome = Outcome::Spreading;
    v.reason = fmt::format("width {:.6g} >= {:.6g} and core minimum {:.6g} >= {:.6g}",
                           e.final_width, r.l_spread, e.core_min, r.delta);
  } else if (e.final_sup <= r.eps_vanish && e.front_advance <= r.eps_front) {
    v.outcome = Outcome::Vanishing;
    v.reason = fmt::format("sup {:.6g} <= {:.6g} and front advance {:.6g} <= {:.6g}", e.final_sup,
                           r.eps_vanish, e.front_advance, r.eps_front);
  } else {
    v.reason = fmt::format("width {:.6g}, sup {:.6g}, front advance {:.6g}, core minimum {:.6g}",
                           e.final_width, e.final_sup, e.front_advance, e.core_min);
  }
  return v;
}

PredictedVerdict dichotomy_predict(const EigenInputs& in) {
  PredictedVerdict out;
  if (in.same_kernels) {
    if (!in.lambda_inf) throw ConfigError("dichotomy needs lambda*(inf)");
    if (*in.lambda_inf >= 0.0) {
      out.prediction = Prediction::Vanishing;
      out.rationale = fmt::format("lambda*(inf) = {:.6g} >= 0: vanishing for every mu and initial datum",
                                  *in.lambda_inf);
      return out;
    }
    if (!in.lambda_h0) throw ConfigError("dichotomy needs lambda*(-h0, h0)");
    if (*in.lambda_h0 <= 0.0) {
      out.prediction = Prediction::Spreading;
      out.rationale = fmt::format("lambda*(-h0, h0) = {:.6g} <= 0: spreading for every mu and initial datum",
                                  *in.lambda_h0);
      return out;
    }
    out.prediction = Prediction::Conditional;
    out.rationale = fmt::format(
        "lambda*(-h0, h0) = {:.6g} > 0 > lambda*(inf) = {:.6g}: outcome depends on mu and the initial size",
        *in.lambda_h0, *in.lambda_inf);
    return out;
  }
  if (!in.constant) {
    out.rationale = "distinct kernels with time-dependent coefficients: no criterion available";
    return out;
  }
  if (!in.lower_inf || !in.upper_inf) throw ConfigError("dichotomy needs the bracket at infinity");
  if (*in.lower_inf >= 0.0) {
    out.prediction = Prediction::Vanishing;
    out.rationale = fmt::format("lower generalized eigenvalue at infinity {:.6g} >= 0", *in.lower_inf);
  } else if (*in.upper_inf < 0.0) {
    out.prediction = Prediction::ConditionalSpreading;
    out.rationale = fmt::format(
        "upper generalized eigenvalue at infinity {:.6g} < 0: spreading when both fronts go to infinity",
        *in.upper_inf);
  } else {
    out.rationale = fmt::format("bracket at infinity [{:.6g}, {:.6g}] straddles 0", *in.lower_inf,
                                *in.upper_inf);
  }
  return out;
}

EigenInputs compute_eigen_inputs(const ModelParams& p, std::size_t n, std::size_t steps) {
  EigenInputs in;
  in.same_kernels = p.same_kernels();
  in.constant = p.coeffs.is_constant();
  const double slope = p.harvest.slope0();
  // with the constant eigenfunction the dispersal terms vanish on the line
  const double inf = ode_floquet_lambda(p.coeffs, slope);
  const double h0 = p.frontier.h0;
  const EigenProblemSpec spec = make_eigen_spec(p, -h0, h0, n, steps);
  if (in.same_kernels) {
    in.lambda_inf = inf;
    in.lambda_h0 = floquet_lambda(spec).lambda;
  } else {
    in.lower_inf = inf;
    in.upper_inf = inf;
    if (in.constant) in.lambda_h0 = generalized_bracket(spec).lower;
  }
  return in;
}

VanishingCertificate certificate_at(const ModelParams& p, double h1, std::size_t n,
                                    std::size_t steps) {
  const double h0 = p.frontier.h0;
  if (!(h1 > h0)) throw ConfigError(fmt::format("certificate needs h1 > h0 (h1={}, h0={})", h1, h0));
  EigenProblemSpec spec = make_eigen_spec(p, -h1, h1, n, steps);
  const PerronResult pr = periodic_perron(spec, LinearPeriodMap::Scheme::RK4);
  const double tau = p.coeffs.tau;
  VanishingCertificate c;
  c.h1 = h1;
  c.lambda = -std::log(pr.ratio_max) / tau;  // lower end of the bracket
  if (!(c.lambda > 0.0)) return c;

  // periodic eigenfunction over one period, normalized to sup 1
  const double lam = -std::log(pr.rho) / tau;
  const LinearPeriodMap map(spec, LinearPeriodMap::Scheme::RK4);
  std::vector<std::vector<double>> phi, psi;
  map.apply_history(pr.phi, pr.psi, phi, psi);
  double top = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double g = std::exp(lam * tau * static_cast<double>(k) / static_cast<double>(steps));
    for (std::size_t j = 0; j < phi[k].size(); ++j) top = std::max({top, g * phi[k][j], g * psi[k][j]});
  }
  for (std::size_t j = 0; j < pr.phi.size(); ++j) top = std::max({top, pr.phi[j], pr.psi[j]});
  double emin = std::numeric_limits<double>::infinity();
  const double dx = spec.dx();
  for (std::size_t j = 0; j < pr.phi.size(); ++j) {
    const double x = -h1 + static_cast<double>(j) * dx;
    if (std::abs(x) <= h0 + 1e-12 * h0) emin = std::min({emin, pr.phi[j] / top, pr.psi[j] / top});
  }

  c.gamma = c.lambda / 2.0;
  c.eig_min = emin;
  const double mu = p.frontier.mu_total();
  c.C1 = mu > 0.0 ? (h1 - h0) * c.gamma / (2.0 * h1 * mu) : std::numeric_limits<double>::infinity();
  c.smallness_bound = c.C1 * emin;
  const double size = p.initial.sup1() + p.initial.sup2();
  c.mu_bound = size > 0.0 ? (h1 - h0) * c.gamma * emin / (2.0 * h1 * size)
                          : std::numeric_limits<double>::infinity();
  c.eta_bar = fmt::format("eta(t) = {} + {} (1 - exp(-{} t))", h0, h1 - h0, c.gamma);
  return c;
}

VanishingCertificate vanishing_certificate(const ModelParams& p, const CertificateOptions& opt) {
  std::optional<VanishingCertificate> best;
  double best_q = 0.0;
  const double h0 = p.frontier.h0;
  for (double f : opt.fractions) {
    const VanishingCertificate c = certificate_at(p, h0 * (1.0 + f), opt.n, opt.steps);
    if (!(c.lambda > 0.0)) continue;
    // smallness bound and mu bound both scale with this quantity
    const double q = (c.h1 - h0) * c.gamma * c.eig_min / c.h1;
    if (!best || q > best_q) {
      best = c;
      best_q = q;
    }
  }
  if (!best) throw NumericalError("certificate unavailable: no h1 with a positive eigenvalue");
  return *best;
}

ModelParams with_mu(const ModelParams& p, double mu, double ratio) {
  ModelParams q = p;
  q.frontier.mu1 = mu * ratio / (1.0 + ratio);
  q.frontier.mu2 = mu / (1.0 + ratio);
  return q;
}

ThresholdResult mu_threshold_search(const ModelParams& p, const ThresholdOptions& opt) {
  if (!(opt.lo > 0.0) || !(opt.hi > opt.lo)) throw ConfigError("threshold bracket needs 0 < lo < hi");
  if (!(opt.ratio >= 0.0)) throw ConfigError("mu ratio must be nonnegative");
  if (opt.check_regime) {
    const EigenInputs in = compute_eigen_inputs(p);
    const PredictedVerdict pv = dichotomy_predict(in);
    if (pv.prediction != Prediction::Conditional) {
      throw ConfigError("threshold search needs the conditional regime: " + pv.rationale);
    }
  }
  ThresholdResult res;
  std::map<double, Outcome> seen;
  // one time step for every probe, stable at the largest mu, so probes
  // share the discretization and stay comparable
  SimConfig base = opt.sim;
  base.keep_snapshots = false;
  const double tau = p.coeffs.tau;
  const double lim = stable_dt(with_mu(p, opt.hi, opt.ratio), base.dx);
  if (base.dt > lim) base.dt = tau / std::ceil(tau / lim);
  res.dt = base.dt;
  auto probe = [&](double mu) {
    SimConfig cfg = base;
    const ModelParams q = with_mu(p, mu, opt.ratio);
    Verdict v = classify_trajectory(run_free(q, cfg), cfg.tolerances);
    if (v.outcome == Outcome::Undetermined) {
      cfg.horizon *= 2;
      v = classify_trajectory(run_free(q, cfg), cfg.tolerances);
    }
    res.probes.push_back({mu, v.outcome, cfg.horizon});
    seen[mu] = v.outcome;
    if (v.outcome == Outcome::Undetermined) ++res.undetermined;
    return v.outcome;
  };

  if (probe(opt.lo) != Outcome::Vanishing || probe(opt.hi) != Outcome::Spreading) {
    throw ConfigError(fmt::format("bracket [{}, {}] does not separate vanishing from spreading: {} / {}",
                                  opt.lo, opt.hi, to_string(seen[opt.lo]), to_string(seen[opt.hi])));
  }
  double lv = opt.lo, us = opt.hi;
  double ul = std::numeric_limits<double>::infinity();  // undetermined region
  double uh = -ul;
  for (std::size_t i = 0; i < opt.budget; ++i) {
    double mid;
    if (!(ul <= uh)) {
      mid = 0.5 * (lv + us);
    } else if (ul - lv >= us - uh) {
      mid = 0.5 * (lv + ul);
    } else {
      mid = 0.5 * (uh + us);
    }
    switch (probe(mid)) {
      case Outcome::Vanishing:
        lv = std::max(lv, mid);
        break;
      case Outcome::Spreading:
        us = std::min(us, mid);
        break;
      case Outcome::Undetermined:
        ul = std::min(ul, mid);
        uh = std::max(uh, mid);
        break;
    }
  }
  res.mu_low = lv;
  res.mu_high = us;

  // verdicts must be ordered: no spreading below a vanishing probe
  double max_v = -std::numeric_limits<double>::infinity();
  double min_s = std::numeric_limits<double>::infinity();
  for (const auto& [mu, o] : seen) {
    if (o == Outcome::Vanishing) max_v = std::max(max_v, mu);
    if (o == Outcome::Spreading) min_s = std::min(min_s, mu);
  }
  res.monotone = max_v < min_s;

  try {
    res.analytic_mu_low = vanishing_certificate(p, opt.certificate).mu_bound;
  } catch (const NumericalError&) {
    res.analytic_mu_low.reset();
  }
  return res;
}

}  // namespace pulsefront
