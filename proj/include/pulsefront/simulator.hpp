#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pulsefront/kernel.hpp"
#include "pulsefront/model.hpp"

namespace pulsefront {

/// Discretized densities on the active nodes x_j = origin + (first + j) dx,
/// j = 0..size()-1, together with the continuous fronts g <= x_0 and
/// x_last <= h. In fixed mode g, h are the interval ends.
struct FrontState {
  std::uint64_t step = 0;  // Euler steps taken since t = 0
  double t = 0.0;
  double g = 0.0;
  double h = 0.0;
  double origin = 0.0;
  double dx = 0.0;
  std::int64_t first = 0;
  std::vector<double> u1;
  std::vector<double> u2;

  std::size_t size() const { return u1.size(); }
  double x(std::size_t j) const {
    return origin + static_cast<double>(first + static_cast<std::int64_t>(j)) * dx;
  }
  double x_left() const { return x(0); }
  double x_right() const { return x(size() - 1); }
};

/// Classification surrogates for the asymptotic definitions.
/// Unset values take their defaults from the run (A, h0).
struct ClassifyTolerances {
  std::optional<double> eps_vanish;  // default 1e-5 A
  double eps_front = 1e-6;
  std::optional<double> l_spread;    // default 10 h0
  std::optional<double> delta;       // default 1e-3 A
  std::optional<double> core_lo;     // default -h0/2
  std::optional<double> core_hi;     // default  h0/2
};

struct SimConfig {
  double dx = 0.05;
  double dt = 0.01;
  std::size_t horizon = 10;        // periods
  std::size_t record_stride = 10;  // steps between records (period ends always recorded)
  bool keep_snapshots = true;      // full states at every period boundary
  ClassifyTolerances tolerances;
};

struct Record {
  double t;
  double g;
  double h;
  double mass1;
  double mass2;
  double max1;
  double max2;
  double min_u;     // min over both densities and all nodes
  double core_min;  // min of min(u1, u2) over the core window (inf if empty)
};

enum class PulsePhase { PrePulse, PostPulse };

struct Snapshot {
  std::size_t period;
  PulsePhase phase;
  FrontState state;
};

struct Trajectory {
  std::vector<Record> records;
  std::vector<Snapshot> snapshots;
  FrontState final_state;
  double tau = 1.0;
  double bound = 0.0;  // a-priori bound A
  double h0 = 0.0;
  double core_lo = 0.0;
  double core_hi = 0.0;
  bool fixed = false;

  std::size_t periods() const;
};

/// Explicit Euler integrator for the impulsive system with monotone
/// arithmetic so that the discrete comparison principle holds exactly.
class Simulator {
 public:
  Simulator(const ModelParams& params, double dx, double dt);

  /// Largest dt allowed by the positivity/comparison constraints.
  double max_stable_dt() const;
  std::size_t steps_per_period() const { return steps_; }
  double bound() const { return A_; }
  const ModelParams& params() const { return p_; }

  FrontState initial_free() const;
  FrontState initial_fixed(double L1, double L2) const;
  /// Fixed-mode state on [L1, L2] with given node values.
  FrontState make_fixed(double L1, double L2, std::vector<double> u1, std::vector<double> u2) const;

  /// One Euler step of the densities on the current nodes; advances time.
  FrontState step_interior(const FrontState& s) const;
  /// u2 -> H(u2) exactly. Throws NumericalError when t is not a multiple of tau.
  FrontState apply_pulse(const FrontState& s) const;
  /// Front update from the state at the start of the step.
  std::pair<double, double> step_boundaries(const FrontState& s) const;
  /// Full free-boundary step: densities, fronts, node activation.
  FrontState step_free(const FrontState& s) const;

 private:
  void check_stability() const;

  ModelParams p_;
  double dx_;
  double dt_;
  std::size_t steps_;
  double A_;
  Stencil s1_;
  Stencil s2_;
};

/// Largest dt keeping the scheme monotone for these params at spacing dx.
double stable_dt(const ModelParams& p, double dx);

Trajectory run_free(const ModelParams& params, const SimConfig& cfg);
Trajectory run_fixed(const ModelParams& params, double L1, double L2, const SimConfig& cfg);
/// Fixed-mode run from explicit node values on [L1, L2].
Trajectory run_fixed_from(const ModelParams& params, double L1, double L2,
                          std::vector<double> u1, std::vector<double> u2, const SimConfig& cfg);

struct AuditReport {
  std::size_t frames = 0;
  std::size_t positivity = 0;
  std::size_t bound = 0;
  std::size_t pulse = 0;
  std::size_t front = 0;
  std::size_t time_order = 0;

  std::size_t violations() const { return positivity + bound + pulse + front + time_order; }
};

/// Re-checks positivity, the a-priori bound, pulse exactness (bit-exact on the
/// pulse snapshots) and front monotonicity on every recorded frame.
AuditReport audit_trajectory(const Trajectory& traj, const HarvestRule& rule);

}  // namespace pulsefront
