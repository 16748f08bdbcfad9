#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pulsefront/model.hpp"
#include "pulsefront/simulator.hpp"

namespace pulsefront {

enum class Outcome { Spreading, Vanishing, Undetermined };
std::string_view to_string(Outcome o);

struct Evidence {
  double final_width = 0.0;      // h - g at the last record
  double final_sup = 0.0;        // sup of both densities over the last period
  double front_advance = 0.0;    // growth of h - g over the last period
  double core_min = 0.0;         // min density on the core window, last period
  double width_slope = 0.0;      // front_advance / tau
  double log_sup_slope = 0.0;    // per period, last two periods
};

struct Verdict {
  Outcome outcome = Outcome::Undetermined;
  Evidence evidence;
  std::size_t horizon = 0;  // periods
  std::string reason;
};

/// Resolved classification thresholds.
struct ResolvedTolerances {
  double eps_vanish;
  double eps_front;
  double l_spread;
  double delta;
};
ResolvedTolerances resolve(const ClassifyTolerances& t, double A, double h0);

Verdict classify_trajectory(const Trajectory& traj, const ClassifyTolerances& tol = {});

enum class Prediction { Spreading, Vanishing, Conditional, ConditionalSpreading, Undetermined };
std::string_view to_string(Prediction p);

/// Eigenvalues feeding the dichotomy. For equal kernels lambda_h0 and
/// lambda_inf are principal eigenvalues; otherwise lower_inf/upper_inf
/// bracket the generalized ones.
struct EigenInputs {
  bool same_kernels = true;
  bool constant = true;
  std::optional<double> lambda_h0;
  std::optional<double> lambda_inf;
  std::optional<double> lower_inf;
  std::optional<double> upper_inf;
};

struct PredictedVerdict {
  Prediction prediction = Prediction::Undetermined;
  std::string rationale;
};

/// Throws ConfigError when the inputs needed by the route are missing.
PredictedVerdict dichotomy_predict(const EigenInputs& in);

/// Eigenvalues on [-h0, h0] (grid n, steps) and on the whole line.
EigenInputs compute_eigen_inputs(const ModelParams& p, std::size_t n = 128, std::size_t steps = 128);

struct VanishingCertificate {
  double h1 = 0.0;
  double lambda = 0.0;  // lower eigenvalue on (-h1, h1)
  double gamma = 0.0;
  double C1 = 0.0;      // (h1 - h0) gamma / (2 h1 (mu1 + mu2))
  double eig_min = 0.0; // min over [-h0, h0] of both eigenfunctions at t = 0 (sup-normalized)
  double smallness_bound = 0.0;  // bound on ||u10|| + ||u20||
  double mu_bound = 0.0;         // analytic mu threshold for the given initial data
  std::string eta_bar;           // front envelope description
};

struct CertificateOptions {
  std::size_t n = 256;
  std::size_t steps = 256;
  std::vector<double> fractions{0.1, 0.2, 0.5};  // h1 = h0 (1 + fraction)
};

/// Searches h1 over the fractions and keeps the largest certificate.
/// Throws NumericalError("certificate unavailable") when no h1 has a
/// positive eigenvalue.
VanishingCertificate vanishing_certificate(const ModelParams& p, const CertificateOptions& opt = {});
/// Certificate at a given h1; ConfigError when h1 <= h0.
VanishingCertificate certificate_at(const ModelParams& p, double h1, std::size_t n = 256,
                                    std::size_t steps = 256);

struct Probe {
  double mu = 0.0;
  Outcome outcome = Outcome::Undetermined;
  std::size_t horizon = 0;
};

struct ThresholdResult {
  double mu_low = 0.0;   // largest total mu seen to vanish
  double mu_high = 0.0;  // smallest total mu seen to spread
  std::optional<double> analytic_mu_low;
  std::vector<Probe> probes;  // in evaluation order
  bool monotone = true;       // verdicts ordered in mu across all probes
  std::size_t undetermined = 0;
  double dt = 0.0;  // time step shared by all probes
};

struct ThresholdOptions {
  double ratio = 1.0;  // mu1 : mu2
  double lo = 0.01;
  double hi = 10.0;
  std::size_t budget = 12;  // probes after the two endpoints
  SimConfig sim;
  CertificateOptions certificate;
  bool check_regime = true;
};

ThresholdResult mu_threshold_search(const ModelParams& p, const ThresholdOptions& opt);

/// Params with total expansion capacity mu split as ratio : 1.
ModelParams with_mu(const ModelParams& p, double mu, double ratio);

}  // namespace pulsefront
