#include "alf/fresnel.hpp"

#include <cmath>
#include <sstream>

#include "fft.hpp"

namespace alf::fresnel {

namespace {

double frequency(std::size_t k, std::size_t n, double dx) {
  const double kk = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
  return kk / (static_cast<double>(n) * dx);
}

}  // namespace

ComplexField fresnel_propagate(const ComplexField& field, double z, Warnings* warnings) {
  if (z < 0.0) throw InvalidConfiguration("fresnel: z must be >= 0");
  if (z == 0.0) return field;
  const auto& g = field.grid();
  const std::size_t n = g.x_samples();
  const double lambda = g.wavelength();
  const double critical = static_cast<double>(n) * g.dx() * g.dx() / lambda;
  if (warnings && z > critical) {
    std::ostringstream os;
    os << "fresnel: z = " << z << " m exceeds N dx^2 / lambda = " << critical
       << " m; result is valid only while the propagated field stays inside the window";
    warnings->push_back(os.str());
  }
  std::vector<Complex> spec(field.samples().begin(), field.samples().end());
  detail::dft_inplace(spec, FFTW_FORWARD);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = frequency(k, n, g.dx());
    const double phase = std::remainder(-kPi * lambda * z * u * u, 2.0 * kPi);
    spec[k] *= Complex{std::cos(phase), std::sin(phase)};
  }
  detail::dft_inplace(spec, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : spec) v *= scale;
  return ComplexField(g, std::move(spec));
}

ComplexField apply_mask(const ComplexField& field, const ElementSpec& element) {
  const auto t = transmittance(element, field.grid());
  ComplexField out = field;
  for (std::size_t i = 0; i < out.samples().size(); ++i) out[i] *= t[i];
  return out;
}

ComplexField band_limit(const ComplexField& field, double theta_max) {
  const auto& g = field.grid();
  const std::size_t n = g.x_samples();
  std::vector<Complex> spec(field.samples().begin(), field.samples().end());
  detail::dft_inplace(spec, FFTW_FORWARD);
  const double u_max = g.theta_to_u(theta_max);
  for (std::size_t k = 0; k < n; ++k) {
    if (std::abs(frequency(k, n, g.dx())) > u_max) spec[k] = Complex{};
  }
  detail::dft_inplace(spec, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : spec) v *= scale;
  return ComplexField(g, std::move(spec));
}

ComplexField band_limited_point(const PhaseSpaceGrid& grid, double x0, double theta_max) {
  const std::size_t n = grid.x_samples();
  const double u_max = grid.theta_to_u(theta_max);
  const double du = 1.0 / (static_cast<double>(n) * grid.dx());
  std::vector<Complex> spec(n, Complex{});
  for (std::size_t k = 0; k < n; ++k) {
    const double u = frequency(k, n, grid.dx());
    if (std::abs(u) <= u_max) {
      // Spectrum of delta(x - x0) relative to the grid origin x[0].
      const double phase = -2.0 * kPi * u * (x0 - grid.x(0));
      spec[k] = du * Complex{std::cos(phase), std::sin(phase)};
    }
  }
  detail::dft_inplace(spec, FFTW_BACKWARD);
  return ComplexField(grid, std::move(spec));
}

}  // namespace alf::fresnel
