#pragma once

#include <array>
#include <string_view>
#include <utility>
#include <vector>

#include "pulsefront/kernel.hpp"
#include "pulsefront/model.hpp"

namespace pulsefront {

/// Periodic eigenproblem on [left, left + length]. `n` counts grid cells
/// (n + 1 nodes, dx = length / n); `steps` counts time steps per period.
/// The interval is stored as (left, length) so translation is exact.
struct EigenProblemSpec {
  double left = 0.0;
  double length = 1.0;
  Coefficients coeffs;
  Kernel k1 = Kernel::triangular(1.0);
  Kernel k2 = Kernel::triangular(1.0);
  double slope = 1.0;  // H'(0)
  std::size_t n = 256;
  std::size_t steps = 256;
  double tol = 1e-12;
  std::size_t max_iter = 200000;

  double L1() const { return left; }
  double L2() const { return left + length; }
  double dx() const { return length / static_cast<double>(n); }
  /// Throws ConfigError when L1 >= L2, slope <= 0 or n < 8.
  void validate() const;
};

EigenProblemSpec make_eigen_spec(const ModelParams& p, double L1, double L2, std::size_t n = 256,
                                 std::size_t steps = 256);

enum class EigenMethod { Power, ClosedForm, Floquet, OdeFloquet };
std::string_view to_string(EigenMethod m);

struct EigenResult {
  double lambda = 0.0;
  EigenMethod method = EigenMethod::Power;
  double residual = 0.0;
  std::size_t n = 0;
  std::size_t steps = 0;
  std::size_t iterations = 0;
  bool surrogate = false;  // discrete Perron value for k1 != k2

  // spatial profiles at t = 0 (before the pulse); Power fills phi only
  std::vector<double> x;
  std::vector<double> phi;
  std::vector<double> psi;

  // closed form extras; time factors sampled at t_k = k tau / steps with
  // k = 0 meaning t = 0+ (just after the pulse)
  double lambda0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double m = 0.0;
  double Lambda = 1.0;
  std::vector<double> time;
  std::vector<double> alpha;
  std::vector<double> beta;
};

struct GeneralizedBracket {
  double lower = 0.0;
  double upper = 0.0;
  double surrogate = 0.0;  // discrete Perron value
  std::string witness;
};

/// Principal eigenvalue of u -> ∫_0^L J(x-y)u(y)dy - u on n cells.
EigenResult lambda0(const Kernel& k, double length, std::size_t n, double tol = 1e-13,
                    std::size_t max_iter = 1000000);

/// Roots c1 > c2 of the constant-coefficient 2x2 system with the spatial
/// factor lambda0. Throws ConfigError for time-dependent coefficients.
std::pair<double, double> characteristic_roots(const Coefficients& c, double lambda0);
/// Same with separate spatial factors per species.
std::pair<double, double> characteristic_roots(const Coefficients& c, double l1, double l2);

EigenResult closed_form_lambda(const EigenProblemSpec& spec);
/// Closed form with a given lambda0 (skips the spatial eigenproblem).
EigenResult closed_form_from_lambda0(const Coefficients& c, double slope, double lambda0,
                                     std::size_t samples = 256);

EigenResult floquet_lambda(const EigenProblemSpec& spec);

/// (4 f(n) - f(n/2)) / 3 for a second-order method.
double richardson(double coarse, double fine);

GeneralizedBracket generalized_bracket(const EigenProblemSpec& spec);

double lambda_sensitivity(const EigenProblemSpec& spec);

EigenProblemSpec translate_interval(const EigenProblemSpec& spec, double shift);

/// Principal eigenvalue of the spatially homogeneous impulsive 2x2 system
/// with spatial factors l1, l2 (0, 0 for the whole line). Handles
/// piecewise-constant coefficients exactly.
double ode_floquet_lambda(const Coefficients& c, double slope, double l1 = 0.0, double l2 = 0.0);

using Mat2 = std::array<double, 4>;  // row-major
/// exp(M t) for a 2x2 matrix with real distinct eigenvalues.
Mat2 expm2(const Mat2& M, double t);
Mat2 mul2(const Mat2& A, const Mat2& B);

/// Linear period map (pulse, then evolution over one period) of the
/// discretized eigenproblem without the +λ shift.
class LinearPeriodMap {
 public:
  enum class Scheme { RK4, Euler };

  LinearPeriodMap(const EigenProblemSpec& spec, Scheme scheme);

  std::size_t nodes() const { return spec_.n + 1; }
  /// In-place application of the period map.
  void apply(std::vector<double>& phi, std::vector<double>& psi) const;
  /// Same, storing the state after the pulse and after every step
  /// (steps + 1 entries, first is t = 0+).
  void apply_history(const std::vector<double>& phi, const std::vector<double>& psi,
                     std::vector<std::vector<double>>& phi_t,
                     std::vector<std::vector<double>>& psi_t) const;

 private:
  void rhs(std::size_t k, const std::vector<double>& p, const std::vector<double>& q,
           std::vector<double>& dp, std::vector<double>& dq) const;
  void step(std::size_t k, std::vector<double>& p, std::vector<double>& q) const;

  EigenProblemSpec spec_;
  Scheme scheme_;
  Stencil s1_;
  Stencil s2_;
  double dt_;
};

struct PerronResult {
  double rho = 0.0;
  double spread = 0.0;  // (max ratio - min ratio) / rho
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  std::size_t iterations = 0;
  std::vector<double> phi;
  std::vector<double> psi;
};

/// Power iteration; stops when the Collatz-Wielandt spread drops below tol.
/// Starts from (phi0, psi0) when given, else from the all-ones pair.
/// Throws NumericalError on stagnation.
PerronResult perron(const LinearPeriodMap& map, double tol, std::size_t max_iter,
                    const std::vector<double>* phi0 = nullptr,
                    const std::vector<double>* psi0 = nullptr);

/// Perron pair of the period map of `spec` with the chosen time scheme,
/// warm-started from the spatial Perron vectors.
PerronResult periodic_perron(const EigenProblemSpec& spec, LinearPeriodMap::Scheme scheme);

}  // namespace pulsefront
