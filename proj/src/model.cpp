#include "pulsefront/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "pulsefront/errors.hpp"

namespace pulsefront {

PeriodicFunction::PeriodicFunction(double constant)
    : slots_{constant}, sup_(constant), inf_(constant) {}

PeriodicFunction::PeriodicFunction(std::vector<double> slots) : slots_(std::move(slots)) {
  if (slots_.empty()) throw ConfigError("periodic coefficient table is empty");
  sup_ = *std::max_element(slots_.begin(), slots_.end());
  inf_ = *std::min_element(slots_.begin(), slots_.end());
}

double PeriodicFunction::at_phase(double phase) const {
  phase -= std::floor(phase);
  auto k = static_cast<std::size_t>(phase * static_cast<double>(slots_.size()));
  return slots_[std::min(k, slots_.size() - 1)];
}

bool Coefficients::is_constant() const {
  return b.is_constant() && a.is_constant() && m1.is_constant() && m2.is_constant() &&
         alpha1.is_constant() && alpha2.is_constant();
}

void Coefficients::validate() const {
  std::vector<std::string> bad;
  auto positive_fn = [&](const PeriodicFunction& f, const char* name) {
    if (!(f.inf() > 0.0) || !std::isfinite(f.sup())) {
      bad.push_back(fmt::format("coefficient {} must be finite and strictly positive (min {})",
                                name, f.inf()));
    }
  };
  if (!(d1 >= 0.0) || !std::isfinite(d1)) bad.push_back("d1 must be nonnegative");
  if (!(d2 >= 0.0) || !std::isfinite(d2)) bad.push_back("d2 must be nonnegative");
  if (!(tau > 0.0) || !std::isfinite(tau)) bad.push_back("tau must be positive");
  positive_fn(b, "b");
  positive_fn(a, "a");
  positive_fn(m1, "m1");
  positive_fn(m2, "m2");
  positive_fn(alpha1, "alpha1");
  positive_fn(alpha2, "alpha2");
  if (!bad.empty()) throw ConfigError(bad.front(), bad);
}

HarvestRule::HarvestRule(Variant rule) : rule_(rule) {
  std::visit(
      [](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, LinearHarvest>) {
          if (!(r.c > 0.0)) throw ConfigError("linear harvest needs c > 0");
        } else if constexpr (std::is_same_v<T, BevertonHoltHarvest>) {
          if (!(r.m > 0.0) || !(r.a > 0.0)) throw ConfigError("Beverton-Holt harvest needs m, a > 0");
        } else if constexpr (std::is_same_v<T, RickerHarvest>) {
          if (!(r.b > 0.0) || !std::isfinite(r.r)) throw ConfigError("Ricker harvest needs b > 0");
        }
      },
      rule_);
}

double HarvestRule::apply(double u) const {
  if (u < 0.0 || std::isnan(u)) {
    throw ConfigError(fmt::format("harvest applied to negative density {}", u));
  }
  return std::visit(
      [u](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, LinearHarvest>) {
          return r.c * u;
        } else if constexpr (std::is_same_v<T, BevertonHoltHarvest>) {
          return r.m * u / (r.a + u);
        } else if constexpr (std::is_same_v<T, RickerHarvest>) {
          return u * std::exp(r.r - r.b * u);
        } else {
          return u;
        }
      },
      rule_);
}

double HarvestRule::slope0() const {
  return std::visit(
      [](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, LinearHarvest>) {
          return r.c;
        } else if constexpr (std::is_same_v<T, BevertonHoltHarvest>) {
          return r.m / r.a;
        } else if constexpr (std::is_same_v<T, RickerHarvest>) {
          return std::exp(r.r);
        } else {
          return 1.0;
        }
      },
      rule_);
}

std::string HarvestRule::name() const {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, LinearHarvest>) {
          return fmt::format("linear(c={})", r.c);
        } else if constexpr (std::is_same_v<T, BevertonHoltHarvest>) {
          return fmt::format("beverton-holt(m={}, a={})", r.m, r.a);
        } else if constexpr (std::is_same_v<T, RickerHarvest>) {
          return fmt::format("ricker(r={}, b={})", r.r, r.b);
        } else {
          return "identity";
        }
      },
      rule_);
}

double apply_harvest(const HarvestRule& rule, double u) { return rule.apply(u); }
double harvest_slope0(const HarvestRule& rule) { return rule.slope0(); }

InitialData InitialData::bump(double h0, double amp1, double amp2) {
  if (!(h0 > 0.0)) throw ConfigError("h0 must be positive");
  if (!(amp1 >= 0.0) || !(amp2 >= 0.0)) throw ConfigError("bump amplitudes must be nonnegative");
  InitialData d;
  d.is_bump_ = true;
  d.h0_ = h0;
  d.amp1_ = amp1;
  d.amp2_ = amp2;
  d.sup1_ = amp1;
  d.sup2_ = amp2;
  return d;
}

InitialData InitialData::profile(std::vector<double> x, std::vector<double> u1,
                                 std::vector<double> u2) {
  if (x.size() < 2 || u1.size() != x.size() || u2.size() != x.size()) {
    throw ConfigError("initial profile needs >= 2 rows with matching columns");
  }
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw ConfigError("initial profile x must be strictly increasing");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(u1[i] >= 0.0) || !(u2[i] >= 0.0)) throw ConfigError("initial densities must be >= 0");
  }
  InitialData d;
  d.is_bump_ = false;
  d.h0_ = std::max(-x.front(), x.back());
  d.sup1_ = *std::max_element(u1.begin(), u1.end());
  d.sup2_ = *std::max_element(u2.begin(), u2.end());
  d.x_ = std::move(x);
  d.v1_ = std::move(u1);
  d.v2_ = std::move(u2);
  return d;
}

InitialData InitialData::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open initial profile '{}'", path));
  std::vector<double> x, u1, u2;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0, b = 0, c = 0;
    if (!(row >> a >> b >> c)) continue;
    x.push_back(a);
    u1.push_back(b);
    u2.push_back(c);
  }
  return profile(std::move(x), std::move(u1), std::move(u2));
}

double InitialData::eval(const std::vector<double>& v, double x) const {
  if (x <= x_.front() || x >= x_.back()) {
    if (x == x_.front()) return v.front();
    if (x == x_.back()) return v.back();
    return 0.0;
  }
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const auto j = static_cast<std::size_t>(it - x_.begin());
  const double s = (x - x_[j - 1]) / (x_[j] - x_[j - 1]);
  return (1.0 - s) * v[j - 1] + s * v[j];
}

double InitialData::u1(double x) const {
  if (is_bump_) {
    return std::abs(x) >= h0_ ? 0.0 : amp1_ * std::cos(std::numbers::pi * x / (2.0 * h0_));
  }
  return eval(v1_, x);
}

double InitialData::u2(double x) const {
  if (is_bump_) {
    return std::abs(x) >= h0_ ? 0.0 : amp2_ * std::cos(std::numbers::pi * x / (2.0 * h0_));
  }
  return eval(v2_, x);
}

InitialData InitialData::scaled(double factor) const {
  InitialData d = *this;
  d.amp1_ *= factor;
  d.amp2_ *= factor;
  d.sup1_ *= factor;
  d.sup2_ *= factor;
  for (double& v : d.v1_) v *= factor;
  for (double& v : d.v2_) v *= factor;
  return d;
}

double a_priori_bound(const Coefficients& c, const InitialData& init) {
  return std::max({c.b.sup() / c.alpha1.inf(), c.a.sup() / c.alpha2.inf(), init.sup1(),
                   init.sup2()});
}

double a_priori_bound(const ModelParams& p) { return a_priori_bound(p.coeffs, p.initial); }

bool HypothesisReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

const HypothesisCheck* HypothesisReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

HypothesisCheck validate_kernel(const Kernel& k) {
  HypothesisCheck out{"J", true, "ok", std::nullopt};
  if (!(k.peak() > 0.0)) {
    out.passed = false;
    out.message = "J(0) must be positive";
    out.witness = 0.0;
    return out;
  }
  // fine trapezoid for the mass, evenness at the same points
  const int n = 20000;
  const double h = k.support() / n;
  double mass = 0.5 * k(0.0);
  for (int i = 1; i <= n; ++i) {
    const double x = i * h;
    const double v = k(x);
    if (v < 0.0 || v != k(-x)) {
      out.passed = false;
      out.message = "kernel is negative or not even";
      out.witness = x;
      return out;
    }
    mass += (i == n ? 0.5 : 1.0) * v;
  }
  mass *= 2.0 * h;
  if (std::abs(mass - 1.0) > 1e-6) {
    out.passed = false;
    out.message = fmt::format("kernel mass {} differs from 1", mass);
  }
  return out;
}

HypothesisCheck validate_harvest(const HarvestRule& rule, double range) {
  HypothesisCheck out{"A", true, "ok", std::nullopt};
  const int n = 1000;
  if (!(rule.slope0() > 0.0)) {
    out.passed = false;
    out.message = "H'(0) must be positive";
    out.witness = 0.0;
    return out;
  }
  double prev_ratio = std::numeric_limits<double>::infinity();
  double prev_h = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double u = range * i / n;
    const double h = rule.apply(u);
    const double ratio = h / u;
    std::string why;
    if (!(ratio > 0.0)) {
      why = "H(u)/u must be positive";
    } else if (ratio > 1.0) {
      why = fmt::format("H(u)/u = {} exceeds 1", ratio);
    } else if (ratio > prev_ratio) {
      why = "H(u)/u is not nonincreasing";
    } else if (!(h > prev_h)) {
      why = "H is not strictly increasing";
    }
    if (!why.empty()) {
      out.passed = false;
      out.message = why;
      out.witness = u;
      return out;
    }
    prev_ratio = ratio;
    prev_h = h;
  }
  return out;
}

HypothesisReport validate_hypotheses(const ModelParams& p, std::optional<double> harvest_range) {
  HypothesisReport rep;
  rep.checks.push_back(validate_kernel(p.k1));
  rep.checks.back().name = "J1";
  rep.checks.push_back(validate_kernel(p.k2));
  rep.checks.back().name = "J2";

  const double A = a_priori_bound(p);
  rep.checks.push_back(validate_harvest(p.harvest, harvest_range.value_or(A)));

  HypothesisCheck fr{"frontier", true, "ok", std::nullopt};
  if (!(p.frontier.mu1 >= 0.0) || !(p.frontier.mu2 >= 0.0)) {
    fr.passed = false;
    fr.message = "mu1, mu2 must be nonnegative";
  } else if (!(p.frontier.h0 > 0.0)) {
    fr.passed = false;
    fr.message = "h0 must be positive";
  }
  rep.checks.push_back(fr);

  HypothesisCheck init{"a02", true, "ok", std::nullopt};
  const double h0 = p.frontier.h0;
  for (double xb : {-h0, h0}) {
    if (p.initial.u1(xb) != 0.0 || p.initial.u2(xb) != 0.0) {
      init.passed = false;
      init.message = "initial data must vanish at +-h0";
      init.witness = xb;
      break;
    }
  }
  if (init.passed) {
    const int n = 1000;
    for (int i = 1; i < n; ++i) {
      const double x = -h0 + 2.0 * h0 * i / n;
      if (!(p.initial.u1(x) > 0.0) || !(p.initial.u2(x) > 0.0)) {
        init.passed = false;
        init.message = "initial data must be positive inside (-h0, h0)";
        init.witness = x;
        break;
      }
    }
  }
  rep.checks.push_back(init);
  return rep;
}

}  // namespace pulsefront
