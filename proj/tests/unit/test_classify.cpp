#include <cmath>

#include <doctest.h>

#include "pulsefront/classify.hpp"
#include "pulsefront/eigen.hpp"
#include "pulsefront/errors.hpp"

using namespace pulsefront;

namespace {

// conditional regime: lambda*(-h0, h0) > 0 > lambda*(inf)
ModelParams conditional() {
  ModelParams p;
  p.coeffs.b = 3.0;
  p.harvest = HarvestRule::beverton_holt(1.0, 1.25);
  p.frontier = {0.5, 0.5, 0.5};
  p.initial = InitialData::bump(0.5, 0.5, 0.5);
  return p;
}

SimConfig probe_cfg() {
  SimConfig c;
  c.dx = 0.05;
  c.dt = 0.03125;
  c.horizon = 100;
  c.keep_snapshots = false;
  return c;
}

}  // namespace

TEST_CASE("zero densities vanish, short runs are undetermined") {
  ModelParams p = conditional();
  p.initial = InitialData::bump(0.5, 0.0, 0.0);
  SimConfig c = probe_cfg();
  c.horizon = 6;
  CHECK(classify_trajectory(run_free(p, c)).outcome == Outcome::Vanishing);
  c.horizon = 1;
  const Verdict v = classify_trajectory(run_free(p, c));
  CHECK(v.outcome == Outcome::Undetermined);
  CHECK(v.reason.find("5 periods") != std::string::npos);
}

TEST_CASE("default surrogates scale with A and h0") {
  const ResolvedTolerances r = resolve({}, 4.0, 2.0);
  CHECK(r.eps_vanish == doctest::Approx(4e-5));
  CHECK(r.eps_front == 1e-6);
  CHECK(r.l_spread == 20.0);
  CHECK(r.delta == doctest::Approx(4e-3));
}

TEST_CASE("spreading when the initial interval is already large") {
  ModelParams p = conditional();
  p.coeffs.b = 8.0;
  p.frontier = {2.0, 2.0, 2.0};
  p.initial = InitialData::bump(2.0, 0.5, 0.5);
  SimConfig c = probe_cfg();
  c.dt = 0.01;
  c.horizon = 60;
  const EigenInputs in = compute_eigen_inputs(p, 64, 64);
  CHECK(*in.lambda_h0 < 0.0);
  CHECK(dichotomy_predict(in).prediction == Prediction::Spreading);
  const Verdict v = classify_trajectory(run_free(p, c));
  CHECK(v.outcome == Outcome::Spreading);
  CHECK(v.evidence.final_width >= 20.0);
}

TEST_CASE("dichotomy routes") {
  EigenInputs in;
  in.lambda_inf = 0.2;
  CHECK(dichotomy_predict(in).prediction == Prediction::Vanishing);
  in.lambda_inf = -0.3;
  in.lambda_h0 = -0.1;
  CHECK(dichotomy_predict(in).prediction == Prediction::Spreading);
  in.lambda_h0 = 0.1;
  CHECK(dichotomy_predict(in).prediction == Prediction::Conditional);
  in.lambda_h0.reset();
  CHECK_THROWS_AS(dichotomy_predict(in), ConfigError);
  CHECK_THROWS_AS(dichotomy_predict(EigenInputs{}), ConfigError);

  EigenInputs mixed;
  mixed.same_kernels = false;
  mixed.lower_inf = 0.1;
  mixed.upper_inf = 0.2;
  CHECK(dichotomy_predict(mixed).prediction == Prediction::Vanishing);
  mixed.lower_inf = -0.3;
  mixed.upper_inf = -0.1;
  CHECK(dichotomy_predict(mixed).prediction == Prediction::ConditionalSpreading);
  mixed.upper_inf = 0.1;
  CHECK(dichotomy_predict(mixed).prediction == Prediction::Undetermined);
  mixed.constant = false;
  CHECK(dichotomy_predict(mixed).prediction == Prediction::Undetermined);
}

TEST_CASE("eigen inputs in the conditional regime") {
  const EigenInputs in = compute_eigen_inputs(conditional(), 64, 64);
  CHECK(*in.lambda_h0 > 0.0);
  CHECK(*in.lambda_inf < 0.0);
  CHECK(dichotomy_predict(in).prediction == Prediction::Conditional);
}

TEST_CASE("vanishing certificate") {
  const ModelParams p = conditional();
  const VanishingCertificate c = vanishing_certificate(p, {64, 64, {0.1, 0.2, 0.5}});
  CHECK(c.h1 > 0.5);
  CHECK(c.gamma == c.lambda / 2.0);
  CHECK(c.C1 == doctest::Approx((c.h1 - 0.5) * c.gamma / (2.0 * c.h1 * 1.0)).epsilon(1e-15));
  CHECK(c.smallness_bound == doctest::Approx(c.C1 * c.eig_min).epsilon(1e-15));
  CHECK(c.eig_min > 0.0);
  CHECK(c.eig_min <= 1.0);
  // mu form: (h1 - h0) gamma / (2 h1 C1') with C1' = (|u10| + |u20|) / eig_min
  CHECK(c.mu_bound == doctest::Approx((c.h1 - 0.5) * c.gamma * c.eig_min / (2.0 * c.h1 * 1.0)).epsilon(1e-15));

  CHECK_THROWS_AS(certificate_at(p, 0.5), ConfigError);
  CHECK_THROWS_AS(certificate_at(p, 0.4), ConfigError);

  ModelParams big = p;
  big.frontier.h0 = 3.0;
  big.initial = InitialData::bump(3.0, 0.5, 0.5);
  CHECK_THROWS_AS(vanishing_certificate(big, {64, 64, {0.1, 0.2, 0.5}}), NumericalError);
}

TEST_CASE("threshold search") {
  const ModelParams p = conditional();
  ThresholdOptions opt;
  opt.lo = 0.01;
  opt.hi = 5.0;
  opt.budget = 4;
  opt.sim = probe_cfg();
  opt.certificate = {64, 64, {0.1, 0.2, 0.5}};
  const ThresholdResult a = mu_threshold_search(p, opt);
  CHECK(a.mu_low <= a.mu_high);
  CHECK(a.monotone);
  CHECK(a.probes.size() == 6);
  REQUIRE(a.analytic_mu_low.has_value());
  CHECK(*a.analytic_mu_low <= a.mu_low);

  opt.budget = 8;
  const ThresholdResult b = mu_threshold_search(p, opt);
  CHECK(b.mu_high - b.mu_low <= a.mu_high - a.mu_low);
  CHECK(b.mu_low >= a.mu_low);
  CHECK(b.mu_high <= a.mu_high);

  opt.hi = 0.02;
  CHECK_THROWS_AS(mu_threshold_search(p, opt), ConfigError);

  ModelParams spreading = p;
  spreading.frontier.h0 = 2.0;
  spreading.initial = InitialData::bump(2.0, 0.5, 0.5);
  opt.hi = 5.0;
  CHECK_THROWS_AS(mu_threshold_search(spreading, opt), ConfigError);
}

TEST_CASE("mu split") {
  const ModelParams q = with_mu(conditional(), 3.0, 2.0);
  CHECK(q.frontier.mu1 == 2.0);
  CHECK(q.frontier.mu2 == 1.0);
}
