#include "alf/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"

namespace alf::propagation {

namespace {

struct Loss {
  double magnitude = 0.0;  // sum |v| of lost samples
  double energy = 0.0;     // sum v^2 of lost samples
};

Loss shear_band_limited(const AugmentedLightField& in, double z, AugmentedLightField& out) {
  const auto& g = in.grid();
  const std::size_t n = g.x_samples();
  const std::size_t m = g.theta_samples();
  double max_shift = 0.0;
  for (std::size_t j = 0; j < m; ++j) max_shift = std::max(max_shift, std::abs(z * g.theta(j)) / g.dx());
  // Pad so that content shifted out of the window lands in the pad instead of
  // wrapping back in; the extra 64 samples absorb interpolation ringing.
  const std::size_t p = detail::fast_fft_size(n + static_cast<std::size_t>(std::ceil(max_shift)) + 64);
  detail::FftPlan fwd(p, FFTW_FORWARD);
  detail::FftPlan inv(p, FFTW_BACKWARD);
  auto a = fwd.buffer();
  auto b = inv.buffer();
  Loss lost;
  for (std::size_t j = 0; j < m; ++j) {
    const double shift = z * g.theta(j) / g.dx();
    std::fill(a.begin(), a.end(), Complex{});
    for (std::size_t i = 0; i < n; ++i) a[i] = in(i, j);
    fwd.execute();
    for (std::size_t k = 0; k < p; ++k) {
      // Signed frequency index; the Nyquist bin of an even length keeps a real factor.
      double kk = k <= p / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(p);
      const double phase = -2.0 * kPi * kk * shift / static_cast<double>(p);
      Complex f{std::cos(phase), std::sin(phase)};
      if (p % 2 == 0 && k == p / 2) f = Complex{std::cos(phase), 0.0};
      b[k] = a[k] * f;
    }
    inv.execute();
    const double scale = 1.0 / static_cast<double>(p);
    for (std::size_t i = 0; i < n; ++i) out(i, j) = b[i].real() * scale;
    for (std::size_t i = n; i < p; ++i) {
      const double v = b[i].real() * scale;
      lost.magnitude += std::abs(v);
      lost.energy += v * v;
    }
  }
  return lost;
}

Loss shear_linear(const AugmentedLightField& in, double z, AugmentedLightField& out) {
  const auto& g = in.grid();
  const std::size_t n = g.x_samples();
  const std::size_t m = g.theta_samples();
  const auto ni = static_cast<long long>(n);
  Loss lost;
  for (std::size_t j = 0; j < m; ++j) {
    const double shift = z * g.theta(j) / g.dx();
    const double base = std::floor(shift);
    const double frac = shift - base;
    const auto offset = static_cast<long long>(base);
    auto deposit = [&](long long idx, double v) {
      if (idx >= 0 && idx < ni) {
        out(static_cast<std::size_t>(idx), j) += v;
      } else {
        lost.magnitude += std::abs(v);
        lost.energy += v * v;
      }
    };
    for (std::size_t k = 0; k < n; ++k) {
      const double v = in(k, j);
      if (v == 0.0) continue;
      const long long dst = static_cast<long long>(k) + offset;
      deposit(dst, (1.0 - frac) * v);
      if (frac != 0.0) deposit(dst + 1, frac * v);
    }
  }
  return lost;
}

}  // namespace

ShearResult shear_propagate(const AugmentedLightField& lf, double z, Interpolation interp) {
  const auto& g = lf.grid();
  if (z == 0.0) return {lf, 0.0, 0.0, {}};

  ShearResult res{AugmentedLightField(g), 0.0, 0.0, {}};
  const double theta_max = 0.5 * g.theta_extent();
  if (std::abs(z * theta_max) > g.x_extent()) {
    std::ostringstream os;
    os << "shear: |z theta_max| = " << std::abs(z * theta_max) << " m exceeds the x window "
       << g.x_extent() << " m; sheared content is truncated";
    res.warnings.push_back(os.str());
  }
  const bool band = interp == Interpolation::band_limited;
  const Loss lost = band ? shear_band_limited(lf, z, res.field) : shear_linear(lf, z, res.field);
  res.truncation_loss = lost.magnitude * g.dx() * g.dtheta();
  double in_magnitude = 0.0;
  double in_energy = 0.0;
  for (double v : lf.radiance().data()) {
    in_magnitude += std::abs(v);
    in_energy += v * v;
  }
  if (band) {
    res.truncation_fraction = in_energy > 0.0 ? std::min(1.0, lost.energy / in_energy) : 0.0;
  } else {
    res.truncation_fraction = in_magnitude > 0.0 ? lost.magnitude / in_magnitude : 0.0;
  }
  return res;
}

RotationResult fraunhofer_rotate(const AugmentedLightField& lf) {
  const auto& g = lf.grid();
  const std::size_t n = g.x_samples();
  if (g.theta_samples() != n) {
    std::ostringstream os;
    os << "fraunhofer: rotation needs x_samples == theta_samples (got " << n << " and "
       << g.theta_samples() << "); resample theta to " << n << " samples over the same extent";
    throw InvalidConfiguration(os.str());
  }
  RotationResult res{AugmentedLightField(g), g.x_extent() / g.theta_extent()};
  // x_out[i] / scale == theta[i] and -scale * theta[j] == x[n - j].
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j < n; ++j) res.field(i, j) = lf(n - j, i);
  }
  return res;
}

}  // namespace alf::propagation
