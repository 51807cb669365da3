#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace alf {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Raised when a grid, element or scenario parameter is out of its legal range.
class InvalidConfiguration : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when inputs collapse to a case another operation should handle.
class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical self-check fails (e.g. a Wigner sum is not real).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-fatal diagnostics collected alongside a result.
using Warnings = std::vector<std::string>;

/// Dense row-major 2D array of doubles.
class Array2D {
 public:
  Array2D() = default;
  Array2D(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double max_abs() const;
  double sum() const;

  friend bool operator==(const Array2D&, const Array2D&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Discretization of the flat-land phase space (x, theta) at one wavelength.
///
/// Both axes are half-open and symmetric: x[i] = -x_extent/2 + i*dx with
/// dx = x_extent/x_samples, and likewise for theta. Spatial frequency and
/// angle are related by u = theta / wavelength with no other scale factor.
class PhaseSpaceGrid {
 public:
  static constexpr double kDefaultParaxialLimit = 0.15;

  /// Throws InvalidConfiguration on non-positive extents, wavelength, or counts < 2.
  /// Exceeding the paraxial limit only records a warning.
  static PhaseSpaceGrid make(std::size_t x_samples, double x_extent, std::size_t theta_samples,
                             double theta_extent, double wavelength,
                             double paraxial_limit = kDefaultParaxialLimit);

  std::size_t x_samples() const { return x_samples_; }
  std::size_t theta_samples() const { return theta_samples_; }
  double x_extent() const { return x_extent_; }
  double theta_extent() const { return theta_extent_; }
  double wavelength() const { return wavelength_; }
  double paraxial_limit() const { return paraxial_limit_; }

  double dx() const { return x_extent_ / static_cast<double>(x_samples_); }
  double dtheta() const { return theta_extent_ / static_cast<double>(theta_samples_); }
  double du() const { return dtheta() / wavelength_; }

  double x(std::size_t i) const { return -0.5 * x_extent_ + static_cast<double>(i) * dx(); }
  double theta(std::size_t j) const {
    return -0.5 * theta_extent_ + static_cast<double>(j) * dtheta();
  }
  double u(std::size_t j) const { return theta_to_u(theta(j)); }

  double theta_to_u(double theta) const { return theta / wavelength_; }
  double u_to_theta(double u) const { return u * wavelength_; }

  /// Index of the sample nearest to x (clamped); `inside` reports whether x lies in the window.
  std::size_t nearest_x(double x, bool* inside = nullptr) const;
  std::size_t nearest_theta(double theta, bool* inside = nullptr) const;

  const Warnings& warnings() const { return warnings_; }

  bool same_sampling(const PhaseSpaceGrid& other) const;

 private:
  PhaseSpaceGrid() = default;

  std::size_t x_samples_ = 0;
  std::size_t theta_samples_ = 0;
  double x_extent_ = 0.0;
  double theta_extent_ = 0.0;
  double wavelength_ = 0.0;
  double paraxial_limit_ = kDefaultParaxialLimit;
  Warnings warnings_;
};

/// Throws InvalidConfiguration unless both grids describe the same sampling.
void require_same_grid(const PhaseSpaceGrid& a, const PhaseSpaceGrid& b, const char* what);

/// Sampled complex amplitude g(x) on the grid's x axis.
class ComplexField {
 public:
  ComplexField(PhaseSpaceGrid grid, std::vector<Complex> samples);
  explicit ComplexField(PhaseSpaceGrid grid);

  const PhaseSpaceGrid& grid() const { return grid_; }
  std::span<const Complex> samples() const { return samples_; }
  std::span<Complex> samples() { return samples_; }
  Complex operator[](std::size_t i) const { return samples_[i]; }
  Complex& operator[](std::size_t i) { return samples_[i]; }

  /// Sum |g|^2 dx.
  double energy() const;
  std::vector<double> intensity() const;

 private:
  PhaseSpaceGrid grid_;
  std::vector<Complex> samples_;
};

/// Signed real radiance L(x, theta), indexed [x][theta].
///
/// Normalized so that summing over theta with weight dtheta gives |g(x)|^2
/// for a coherent field g, i.e. L(x, theta) = W(x, theta / lambda) / lambda.
class AugmentedLightField {
 public:
  explicit AugmentedLightField(PhaseSpaceGrid grid);
  AugmentedLightField(PhaseSpaceGrid grid, Array2D radiance);

  const PhaseSpaceGrid& grid() const { return grid_; }
  const Array2D& radiance() const { return radiance_; }
  Array2D& radiance() { return radiance_; }

  double operator()(std::size_t ix, std::size_t jt) const { return radiance_(ix, jt); }
  double& operator()(std::size_t ix, std::size_t jt) { return radiance_(ix, jt); }

  /// Sum L dx dtheta (signed).
  double power() const;

 private:
  PhaseSpaceGrid grid_;
  Array2D radiance_;
};

struct IntensityProfile {
  PhaseSpaceGrid grid;
  std::vector<double> values;

  double power() const;
};

/// Default tolerance below zero allowed in a projected intensity: 1e-6 of the peak.
double default_projection_epsilon(std::span<const double> intensity);

/// True when every value is >= -epsilon (physical intensities are non-negative;
/// delta deposition may leave small negative ringing).
bool within_projection_bound(const IntensityProfile& profile, double epsilon);

/// I(x_i) = sum_j L(x_i, theta_j) dtheta.
IntensityProfile project_intensity(const AugmentedLightField& alf);

/// Light field of a unit plane wave travelling at angle theta0: delta(theta - theta0),
/// deposited on the nearest theta bin with weight 1/dtheta.
AugmentedLightField plane_wave_light_field(const PhaseSpaceGrid& grid, double theta0 = 0.0);

/// Relative L2 distance ||a - b|| / ||b||.
double relative_l2(std::span<const double> a, std::span<const double> b);

}  // namespace alf
