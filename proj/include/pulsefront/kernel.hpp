#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pulsefront {

enum class KernelFamily { Triangular, TruncatedGaussian, Table };

enum class Side { Right, Left };

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

/// Even, nonnegative dispersal kernel with unit mass.
///
/// Triangular:        J(x) = (1 - |x|/s)_+ / s
/// TruncatedGaussian: Gaussian of std-dev s cut at 4s and renormalized
/// Table:             linear interpolation of samples at x = 0, dx, 2dx, ...
///                    (even extension), renormalized by the trapezoid rule.
///
/// All families have compact support; support() returns its half-width.
class Kernel {
 public:
  static Kernel triangular(double sigma);
  static Kernel truncated_gaussian(double sigma);
  /// `values[k]` is the unnormalized kernel at x = k*spacing, k >= 0.
  static Kernel table(double spacing, std::vector<double> values);
  /// Two-column CSV "x,value" with uniformly spaced x starting at 0.
  static Kernel from_csv(const std::filesystem::path& path);

  KernelFamily family() const { return family_; }
  double sigma() const { return sigma_; }
  double support() const { return support_; }
  double peak() const;

  double operator()(double x) const;

  /// Integral of J over [d, +inf) for d >= 0 (closed form / exact for
  /// the piecewise-linear table). For d < 0 uses evenness: 1 - tail(-d).
  double tail(double d) const;

  bool operator==(const Kernel& other) const;

 private:
  Kernel() = default;

  KernelFamily family_ = KernelFamily::Triangular;
  double sigma_ = 1.0;
  double support_ = 1.0;
  double gauss_norm_ = 1.0;
  double table_dx_ = 0.0;
  std::vector<double> table_;
};

/// Composite trapezoid of  ∫_g^h J(x_i - y) u(y) dy  for u sampled on the
/// uniform grid g = y_0 < ... < y_{n-1} = h. Returns 0 for fewer than two nodes.
double interior_convolve(const Kernel& k, std::span<const double> values, double dx,
                         std::size_t i);

/// ∫_boundary^∞ J(x - y) dy  (Right, x <= boundary) or
/// ∫_-∞^boundary J(x - y) dy  (Left, x >= boundary).
double exterior_mass(const Kernel& k, double x, double boundary, Side side);

/// Kernel samples J(m*dx) for m = 0..M where M*dx covers the support; the
/// discrete convolution uses these so that results depend only on node offsets.
class Stencil {
 public:
  Stencil(const Kernel& k, double dx);

  double dx() const { return dx_; }
  std::size_t half_width() const { return taps_.size() - 1; }
  double operator[](std::size_t offset) const {
    return offset < taps_.size() ? taps_[offset] : 0.0;
  }
  /// dx * sum over all offsets (the discrete mass, 1 up to quadrature error).
  double discrete_mass() const;

  /// out[i] = Σ_j w_j J((i-j)dx) u_j over the whole array, trapezoid weights
  /// w = dx with dx/2 at both ends.
  void convolve(std::span<const double> u, std::span<double> out) const;

 private:
  double dx_;
  std::vector<double> taps_;
};

}  // namespace pulsefront
