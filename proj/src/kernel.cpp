#include "pulsefront/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "pulsefront/errors.hpp"

namespace pulsefront {

namespace {

constexpr double kGaussCut = 4.0;

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Triangular:
      return "triangular";
    case KernelFamily::TruncatedGaussian:
      return "gaussian";
    case KernelFamily::Table:
      return "table";
  }
  return "?";
}

KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "triangular") return KernelFamily::Triangular;
  if (name == "gaussian" || name == "truncated-gaussian") return KernelFamily::TruncatedGaussian;
  if (name == "table") return KernelFamily::Table;
  throw ConfigError(fmt::format("unknown kernel family '{}'", name));
}

Kernel Kernel::triangular(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError(fmt::format("kernel width must be positive, got {}", sigma));
  }
  Kernel k;
  k.family_ = KernelFamily::Triangular;
  k.sigma_ = sigma;
  k.support_ = sigma;
  return k;
}

Kernel Kernel::truncated_gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError(fmt::format("kernel width must be positive, got {}", sigma));
  }
  Kernel k;
  k.family_ = KernelFamily::TruncatedGaussian;
  k.sigma_ = sigma;
  k.support_ = kGaussCut * sigma;
  // mass of the untruncated density inside [-4s, 4s]
  k.gauss_norm_ = std::erf(kGaussCut / std::numbers::sqrt2);
  return k;
}

Kernel Kernel::table(double spacing, std::vector<double> values) {
  if (!(spacing > 0.0)) throw ConfigError("kernel table spacing must be positive");
  if (values.size() < 2) throw ConfigError("kernel table needs at least two samples");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError("kernel table values must be finite and nonnegative");
    }
  }
  if (!(values.front() > 0.0)) throw ConfigError("kernel table must satisfy J(0) > 0");
  // even extension: mass = 2 * trapezoid over [0, xmax]
  double half = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) half += 0.5 * (values[i] + values[i + 1]);
  half *= spacing;
  const double mass = 2.0 * half;
  for (double& v : values) v /= mass;

  Kernel k;
  k.family_ = KernelFamily::Table;
  k.table_dx_ = spacing;
  k.support_ = spacing * static_cast<double>(values.size() - 1);
  k.sigma_ = k.support_;
  k.table_ = std::move(values);
  return k;
}

Kernel Kernel::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open kernel table '{}'", path.string()));
  std::vector<double> xs;
  std::vector<double> vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0.0;
    double v = 0.0;
    if (!(row >> x >> v)) continue;  // header
    xs.push_back(x);
    vs.push_back(v);
  }
  if (xs.size() < 2) throw ConfigError(fmt::format("kernel table '{}' has < 2 rows", path.string()));
  if (xs.front() != 0.0) throw ConfigError("kernel table must start at x = 0");
  const double spacing = xs[1] - xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (std::abs((xs[i] - xs[i - 1]) - spacing) > 1e-9 * spacing) {
      throw ConfigError("kernel table x column must be uniformly spaced");
    }
  }
  return table(spacing, std::move(vs));
}

double Kernel::peak() const { return (*this)(0.0); }

double Kernel::operator()(double x) const {
  const double ax = std::abs(x);
  switch (family_) {
    case KernelFamily::Triangular:
      return ax >= sigma_ ? 0.0 : (1.0 - ax / sigma_) / sigma_;
    case KernelFamily::TruncatedGaussian: {
      if (ax > support_) return 0.0;
      const double z = ax / sigma_;
      return std::exp(-0.5 * z * z) / (sigma_ * std::sqrt(2.0 * std::numbers::pi) * gauss_norm_);
    }
    case KernelFamily::Table: {
      if (ax >= support_) return 0.0;
      const double s = ax / table_dx_;
      const auto i = static_cast<std::size_t>(s);
      const double frac = s - static_cast<double>(i);
      return (1.0 - frac) * table_[i] + frac * table_[i + 1];
    }
  }
  return 0.0;
}

double Kernel::tail(double d) const {
  if (d < 0.0) return 1.0 - tail(-d);
  if (d >= support_) return 0.0;
  switch (family_) {
    case KernelFamily::Triangular: {
      const double r = 1.0 - d / sigma_;
      return 0.5 * r * r;
    }
    case KernelFamily::TruncatedGaussian: {
      const double inside = std_normal_cdf(kGaussCut) - std_normal_cdf(d / sigma_);
      return inside / gauss_norm_;
    }
    case KernelFamily::Table: {
      // exact integral of the piecewise-linear interpolant from d to support
      const double s = d / table_dx_;
      const auto i = static_cast<std::size_t>(s);
      const double frac = s - static_cast<double>(i);
      const double vd = (1.0 - frac) * table_[i] + frac * table_[i + 1];
      double acc = 0.5 * (vd + table_[i + 1]) * (1.0 - frac) * table_dx_;
      for (std::size_t j = i + 1; j + 1 < table_.size(); ++j) {
        acc += 0.5 * (table_[j] + table_[j + 1]) * table_dx_;
      }
      return acc;
    }
  }
  return 0.0;
}

bool Kernel::operator==(const Kernel& other) const {
  return family_ == other.family_ && sigma_ == other.sigma_ && support_ == other.support_ &&
         table_dx_ == other.table_dx_ && table_ == other.table_;
}

double interior_convolve(const Kernel& k, std::span<const double> values, double dx,
                         std::size_t i) {
  const std::size_t n = values.size();
  if (n < 2 || i >= n) return 0.0;
  const double xi = static_cast<double>(i) * dx;
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j + 1 == n) ? 0.5 * dx : dx;
    acc += w * k(xi - static_cast<double>(j) * dx) * values[j];
  }
  return acc;
}

double exterior_mass(const Kernel& k, double x, double boundary, Side side) {
  if (side == Side::Right) {
    if (x > boundary) throw ConfigError("exterior_mass(Right) requires x <= boundary");
    return k.tail(boundary - x);
  }
  if (x < boundary) throw ConfigError("exterior_mass(Left) requires x >= boundary");
  return k.tail(x - boundary);
}

Stencil::Stencil(const Kernel& k, double dx) : dx_(dx) {
  if (!(dx > 0.0)) throw ConfigError("grid step must be positive");
  const auto m = static_cast<std::size_t>(std::ceil(k.support() / dx));
  taps_.resize(m + 1);
  for (std::size_t i = 0; i <= m; ++i) taps_[i] = k(static_cast<double>(i) * dx);
  while (taps_.size() > 1 && taps_.back() == 0.0) taps_.pop_back();
}

double Stencil::discrete_mass() const {
  double acc = taps_[0];
  for (std::size_t i = 1; i < taps_.size(); ++i) acc += 2.0 * taps_[i];
  return acc * dx_;
}

void Stencil::convolve(std::span<const double> u, std::span<double> out) const {
  const std::size_t n = u.size();
  const std::size_t hw = half_width();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > hw ? i - hw : 0;
    const std::size_t hi = std::min(n - 1, i + hw);
    if (n == 1) {
      out[i] = 0.0;
      continue;
    }
    std::size_t first = lo;
    std::size_t last = hi;
    double acc = 0.0;
    // trapezoid: half weight on the two end nodes
    if (lo == 0) {
      acc += 0.5 * taps_[i] * u[0];
      first = 1;
    }
    if (hi == n - 1) {
      acc += 0.5 * taps_[n - 1 - i] * u[n - 1];
      last = n - 2;
    }
    for (std::size_t j = first; j <= last && j < n; ++j) {
      const std::size_t off = j > i ? j - i : i - j;
      acc += taps_[off] * u[j];
    }
    out[i] = acc * dx_;
  }
}

}  // namespace pulsefront
