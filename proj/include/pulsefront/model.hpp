#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pulsefront/kernel.hpp"

namespace pulsefront {

/// τ-periodic function stored as a piecewise-constant table of equal slots
/// over one period. A single slot is a constant.
class PeriodicFunction {
 public:
  PeriodicFunction(double constant = 1.0);  // NOLINT(google-explicit-constructor)
  explicit PeriodicFunction(std::vector<double> slots);

  /// Value on the slot containing `phase` ∈ [0, 1) (fraction of a period).
  double at_phase(double phase) const;
  /// Value during explicit step `step` of `steps_per_period` (integer slot
  /// lookup, so step boundaries never straddle rounding).
  double at_step(std::size_t step, std::size_t steps_per_period) const {
    return slots_[(step % steps_per_period) * slots_.size() / steps_per_period];
  }

  bool is_constant() const { return sup_ == inf_; }
  double sup() const { return sup_; }
  double inf() const { return inf_; }
  std::size_t slot_count() const { return slots_.size(); }
  const std::vector<double>& slots() const { return slots_; }

 private:
  std::vector<double> slots_;
  double sup_ = 1.0;
  double inf_ = 1.0;
};

/// Rates of the juvenile/adult system. All time-dependent rates share the
/// period `tau`.
struct Coefficients {
  double d1 = 1.0;
  double d2 = 1.0;
  PeriodicFunction b{1.0};       // adult reproduction
  PeriodicFunction a{1.0};       // maturation
  PeriodicFunction m1{1.0};      // juvenile death
  PeriodicFunction m2{1.0};      // adult death
  PeriodicFunction alpha1{1.0};  // juvenile crowding
  PeriodicFunction alpha2{1.0};  // adult crowding
  double tau = 1.0;

  bool is_constant() const;
  /// Throws ConfigError listing every violated positivity constraint.
  void validate() const;
};

struct LinearHarvest {
  double c;
};
struct BevertonHoltHarvest {
  double m;
  double a;
};
struct RickerHarvest {
  double r;
  double b;
};
struct IdentityHarvest {};

/// Pulse map applied to the adult density at t = nτ.
class HarvestRule {
 public:
  using Variant = std::variant<LinearHarvest, BevertonHoltHarvest, RickerHarvest, IdentityHarvest>;

  HarvestRule() : rule_(IdentityHarvest{}) {}
  HarvestRule(Variant rule);  // NOLINT(google-explicit-constructor)

  static HarvestRule linear(double c) { return HarvestRule(LinearHarvest{c}); }
  static HarvestRule beverton_holt(double m, double a) { return HarvestRule(BevertonHoltHarvest{m, a}); }
  static HarvestRule ricker(double r, double b) { return HarvestRule(RickerHarvest{r, b}); }
  static HarvestRule identity() { return HarvestRule(IdentityHarvest{}); }

  /// H(u). Throws ConfigError on negative input.
  double apply(double u) const;
  /// H'(0).
  double slope0() const;
  std::string name() const;
  const Variant& variant() const { return rule_; }

 private:
  Variant rule_;
};

double apply_harvest(const HarvestRule& rule, double u);
double harvest_slope0(const HarvestRule& rule);

struct FrontierParams {
  double mu1 = 1.0;
  double mu2 = 1.0;
  double h0 = 1.0;

  double mu_total() const { return mu1 + mu2; }
};

/// Initial densities on [-h0, h0]: either a cosine bump
/// amp * cos(πx / (2 h0)) or tabulated profiles interpolated linearly.
class InitialData {
 public:
  static InitialData bump(double h0, double amp1, double amp2);
  /// Profiles sampled at increasing `x`; zero outside [x.front(), x.back()].
  static InitialData profile(std::vector<double> x, std::vector<double> u1, std::vector<double> u2);
  /// CSV "x,u1,u2".
  static InitialData from_csv(const std::string& path);

  double u1(double x) const;
  double u2(double x) const;
  double sup1() const { return sup1_; }
  double sup2() const { return sup2_; }
  double half_length() const { return h0_; }

  /// Same shape scaled by `factor`.
  InitialData scaled(double factor) const;

 private:
  InitialData() = default;
  double eval(const std::vector<double>& v, double x) const;

  bool is_bump_ = true;
  double h0_ = 1.0;
  double amp1_ = 0.0;
  double amp2_ = 0.0;
  std::vector<double> x_;
  std::vector<double> v1_;
  std::vector<double> v2_;
  double sup1_ = 0.0;
  double sup2_ = 0.0;
};

/// Full parameter set of one run.
struct ModelParams {
  Coefficients coeffs;
  Kernel k1 = Kernel::triangular(1.0);
  Kernel k2 = Kernel::triangular(1.0);
  HarvestRule harvest;
  FrontierParams frontier;
  InitialData initial = InitialData::bump(1.0, 0.5, 0.5);

  bool same_kernels() const { return k1 == k2; }
};

/// max{ b^M/α₁^m, a^M/α₂^m, ‖u₁,₀‖∞, ‖u₂,₀‖∞ }.
double a_priori_bound(const Coefficients& c, const InitialData& init);
double a_priori_bound(const ModelParams& p);

struct HypothesisCheck {
  std::string name;
  bool passed = true;
  std::string message;
  std::optional<double> witness;
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;

  bool all_passed() const;
  const HypothesisCheck* find(const std::string& name) const;
};

/// Checks the kernel condition, the harvest condition on [0, harvest_range]
/// (1000 samples; defaults to the a-priori bound), the frontier parameters
/// and the initial-data condition. Never throws.
HypothesisReport validate_hypotheses(const ModelParams& p,
                                     std::optional<double> harvest_range = std::nullopt);
HypothesisCheck validate_harvest(const HarvestRule& rule, double range);
HypothesisCheck validate_kernel(const Kernel& k);

}  // namespace pulsefront
