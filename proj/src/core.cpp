#include "alf/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace alf {

double Array2D::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Array2D::sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

PhaseSpaceGrid PhaseSpaceGrid::make(std::size_t x_samples, double x_extent,
                                    std::size_t theta_samples, double theta_extent,
                                    double wavelength, double paraxial_limit) {
  if (x_samples < 2 || theta_samples < 2) {
    throw InvalidConfiguration("grid: sample counts must be >= 2");
  }
  if (!(x_extent > 0.0) || !(theta_extent > 0.0) || !(wavelength > 0.0)) {
    throw InvalidConfiguration("grid: extents and wavelength must be strictly positive");
  }
  if (!(paraxial_limit > 0.0)) {
    throw InvalidConfiguration("grid: paraxial limit must be strictly positive");
  }
  PhaseSpaceGrid g;
  g.x_samples_ = x_samples;
  g.theta_samples_ = theta_samples;
  g.x_extent_ = x_extent;
  g.theta_extent_ = theta_extent;
  g.wavelength_ = wavelength;
  g.paraxial_limit_ = paraxial_limit;
  if (0.5 * theta_extent > paraxial_limit) {
    std::ostringstream os;
    os << "grid: half angle extent " << 0.5 * theta_extent << " rad exceeds paraxial limit "
       << paraxial_limit << " rad";
    g.warnings_.push_back(os.str());
  }
  return g;
}

namespace {

std::size_t nearest_index(double value, double start, double step, std::size_t n,
                          bool* inside) {
  const double pos = (value - start) / step;
  const double r = std::round(pos);
  const bool in = pos >= -0.5 && pos < static_cast<double>(n) - 0.5;
  if (inside) *inside = in;
  if (r <= 0.0) return 0;
  if (r >= static_cast<double>(n - 1)) return n - 1;
  return static_cast<std::size_t>(r);
}

}  // namespace

std::size_t PhaseSpaceGrid::nearest_x(double x, bool* inside) const {
  return nearest_index(x, -0.5 * x_extent_, dx(), x_samples_, inside);
}

std::size_t PhaseSpaceGrid::nearest_theta(double theta, bool* inside) const {
  return nearest_index(theta, -0.5 * theta_extent_, dtheta(), theta_samples_, inside);
}

bool PhaseSpaceGrid::same_sampling(const PhaseSpaceGrid& o) const {
  return x_samples_ == o.x_samples_ && theta_samples_ == o.theta_samples_ &&
         x_extent_ == o.x_extent_ && theta_extent_ == o.theta_extent_ &&
         wavelength_ == o.wavelength_;
}

void require_same_grid(const PhaseSpaceGrid& a, const PhaseSpaceGrid& b, const char* what) {
  if (!a.same_sampling(b)) {
    throw InvalidConfiguration(std::string(what) + ": grid mismatch");
  }
}

ComplexField::ComplexField(PhaseSpaceGrid grid, std::vector<Complex> samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (samples_.size() != grid_.x_samples()) {
    throw InvalidConfiguration("field: sample count does not match grid");
  }
}

ComplexField::ComplexField(PhaseSpaceGrid grid)
    : grid_(std::move(grid)), samples_(grid_.x_samples(), Complex{}) {}

double ComplexField::energy() const {
  double e = 0.0;
  for (const auto& s : samples_) e += std::norm(s);
  return e * grid_.dx();
}

std::vector<double> ComplexField::intensity() const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(),
                 [](Complex c) { return std::norm(c); });
  return out;
}

AugmentedLightField::AugmentedLightField(PhaseSpaceGrid grid)
    : grid_(std::move(grid)), radiance_(grid_.x_samples(), grid_.theta_samples()) {}

AugmentedLightField::AugmentedLightField(PhaseSpaceGrid grid, Array2D radiance)
    : grid_(std::move(grid)), radiance_(std::move(radiance)) {
  if (radiance_.rows() != grid_.x_samples() || radiance_.cols() != grid_.theta_samples()) {
    throw InvalidConfiguration("light field: array shape does not match grid");
  }
}

double AugmentedLightField::power() const {
  return radiance_.sum() * grid_.dx() * grid_.dtheta();
}

double IntensityProfile::power() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.dx();
}

double default_projection_epsilon(std::span<const double> intensity) {
  double peak = 0.0;
  for (double v : intensity) peak = std::max(peak, std::abs(v));
  return 1e-6 * peak;
}

bool within_projection_bound(const IntensityProfile& profile, double epsilon) {
  return std::all_of(profile.values.begin(), profile.values.end(),
                     [epsilon](double v) { return v >= -epsilon; });
}

IntensityProfile project_intensity(const AugmentedLightField& alf) {
  const auto& g = alf.grid();
  IntensityProfile out{g, std::vector<double>(g.x_samples(), 0.0)};
  const double dth = g.dtheta();
  for (std::size_t i = 0; i < g.x_samples(); ++i) {
    double s = 0.0;
    for (double v : alf.radiance().row(i)) s += v;
    out.values[i] = s * dth;
  }
  return out;
}

AugmentedLightField plane_wave_light_field(const PhaseSpaceGrid& grid, double theta0) {
  bool inside = false;
  const std::size_t j = grid.nearest_theta(theta0, &inside);
  if (!inside) {
    throw InvalidConfiguration("plane wave: angle outside the grid's theta window");
  }
  AugmentedLightField lf(grid);
  const double w = 1.0 / grid.dtheta();
  for (std::size_t i = 0; i < grid.x_samples(); ++i) lf(i, j) = w;
  return lf;
}

double relative_l2(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidConfiguration("relative_l2: size mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

}  // namespace alf
