#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pulsefront/classify.hpp"
#include "pulsefront/model.hpp"
#include "pulsefront/simulator.hpp"

namespace pulsefront {

struct NumericsConfig {
  std::optional<double> L1;  // eigen/periodic interval, defaults to [-h0, h0]
  std::optional<double> L2;
  std::size_t eigen_n = 256;
  std::size_t eigen_steps = 256;
  double eigen_tol = 1e-12;
  double monotone_tol = 1e-8;
  std::size_t monotone_max_iter = 200000;

  double left(double h0) const { return L1.value_or(-h0); }
  double right(double h0) const { return L2.value_or(h0); }
};

enum class SweepParameter { Slope, Mu, H0, Length };

struct SweepConfig {
  SweepParameter parameter = SweepParameter::Slope;
  std::vector<double> values;
  std::string task = "eigen";  // eigen | classify
  std::size_t threads = 1;
  double ratio = 1.0;          // mu1 : mu2 for mu sweeps
};

struct RunConfig {
  std::filesystem::path source;
  ModelParams params;
  SimConfig sim;
  NumericsConfig numerics;
  std::vector<double> cert_fractions{0.1, 0.2, 0.5};
  std::optional<SweepConfig> sweep;
  bool strict = false;
  HypothesisReport hypotheses;
  std::vector<std::string> warnings;
  /// Every schema key with its effective value, defaults included.
  std::vector<std::pair<std::string, std::string>> resolved;
};

/// Parses an INI run config. Collects every violation before throwing
/// ConfigError. Hypothesis failures are errors in strict mode and
/// warnings otherwise.
RunConfig parse_config(const std::filesystem::path& path, bool strict = false);
RunConfig parse_config_string(const std::string& text, bool strict = false,
                              const std::filesystem::path& base_dir = ".");

/// Same rule family with H'(0) moved to `slope`.
HarvestRule with_slope(const HarvestRule& rule, double slope);

std::string_view to_string(SweepParameter p);

}  // namespace pulsefront
