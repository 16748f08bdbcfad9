#pragma once

#include <vector>

#include "pulsefront/model.hpp"
#include "pulsefront/simulator.hpp"

namespace pulsefront {

enum class PeriodicKind { SpatialPeriodic, OdeLinear, OdeLogistic };
enum class Direction { FromUpper, FromLower };

/// One period of a periodic orbit. U1[k], U2[k] hold the state at time[k]
/// with k = 0 meaning t = 0+ (just after the pulse) and k = last meaning
/// t = tau. U1_pre, U2_pre are the values at t = 0 before the pulse, so
/// U2[0] == H(U2_pre) exactly. ODE solutions have one node.
struct PeriodicSolution {
  PeriodicKind kind = PeriodicKind::SpatialPeriodic;
  std::vector<double> x;
  std::vector<double> time;
  std::vector<std::vector<double>> U1;
  std::vector<std::vector<double>> U2;
  std::vector<double> U1_pre;
  std::vector<double> U2_pre;
  double residual = 0.0;  // sup |U(tau) - U(0)|
  std::size_t iterations = 0;

  // monotone iteration bookkeeping
  std::vector<double> iterate_sup;  // sup norm of each iterate
  std::vector<double> iterate_min;  // inf of each iterate
  double seed_eps = 0.0;            // FromLower only
  double seed_lambda = 0.0;         // discrete eigenvalue used by the seed

  double sup_distance(const PeriodicSolution& other) const;
};

struct MonotoneOptions {
  double tol = 1e-8;
  std::size_t max_iter = 200000;
};

/// Shift constants K1 = a^M + m1^M + 2 alpha1^M A, K2 = m2^M + 2 alpha2^M A.
std::pair<double, double> shift_constants(const Coefficients& c, double A);

/// Monotone iteration for the fixed-domain periodic problem on [L1, L2],
/// discretized exactly like the simulator with cfg.dx, cfg.dt.
PeriodicSolution monotone_iteration(const ModelParams& p, double L1, double L2,
                                    const SimConfig& cfg, Direction dir,
                                    const MonotoneOptions& opt = {});

/// Attracting orbit of the linear ODE with nonlinear pulse H, started from
/// A* = max{b^M/(a^m+m1^m), a^M/m2^m}.
PeriodicSolution ode_periodic_linear(const Coefficients& c, const HarvestRule& rule,
                                     std::size_t samples = 256);

/// Attractor of the spatially homogeneous logistic system started at (A, A).
PeriodicSolution ode_periodic_logistic(const Coefficients& c, const HarvestRule& rule,
                                       std::size_t samples = 1024);

/// Positive equilibrium of the autonomous system with constant coefficients.
std::pair<double, double> autonomous_equilibrium(const Coefficients& c);

}  // namespace pulsefront
