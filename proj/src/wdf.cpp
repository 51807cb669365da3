#include "alf/wdf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"

namespace alf::wdf {

double sinc(double t) {
  if (t == 0.0) return 1.0;
  const double a = kPi * t;
  return std::sin(a) / a;
}

double triangle(double t) {
  const double a = std::abs(t);
  return a <= 1.0 ? 1.0 - a : 0.0;
}

namespace {

void validate(const WdfOptions& opts) {
  if (opts.oversample_factor != 1 && opts.oversample_factor != 2 &&
      opts.oversample_factor != 4) {
    throw InvalidConfiguration("wdf: oversample_factor must be 1, 2 or 4");
  }
}

std::vector<Complex> windowed(const ComplexField& field, Window window) {
  std::vector<Complex> g(field.samples().begin(), field.samples().end());
  if (window == Window::raised_cosine) {
    // Tukey window, 10% of the aperture tapered on each side.
    const std::size_t n = g.size();
    const double taper = 0.1 * static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = std::min(static_cast<double>(i), static_cast<double>(n - 1 - i));
      if (d < taper) g[i] *= 0.5 * (1.0 - std::cos(kPi * d / taper));
    }
  }
  return g;
}

void check_local_frequency(const ComplexField& field, double theta_half, Warnings& warnings) {
  const auto g = field.samples();
  const auto& grid = field.grid();
  double peak = 0.0;
  for (const auto& v : g) peak = std::max(peak, std::norm(v));
  if (peak == 0.0) return;
  double max_u = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    if (std::norm(g[i]) < 1e-6 * peak || std::norm(g[i + 1]) < 1e-6 * peak) continue;
    const double dphi = std::arg(g[i + 1] * std::conj(g[i]));
    max_u = std::max(max_u, std::abs(dphi) / (2.0 * kPi * grid.dx()));
  }
  const double limit = grid.theta_to_u(theta_half);
  if (max_u >= limit) {
    std::ostringstream os;
    os << "wdf: local frequency " << max_u << " 1/m reaches the theta window limit " << limit
       << " 1/m; content outside the window is not represented";
    warnings.push_back(os.str());
  }
}

}  // namespace

Array2D wigner_samples(const ComplexField& field, double theta_start, double theta_step,
                       std::size_t count, const WdfOptions& opts, WdfDiagnostics* diag) {
  validate(opts);
  const auto& grid = field.grid();
  const std::size_t n = grid.x_samples();
  const std::size_t os = static_cast<std::size_t>(opts.oversample_factor);
  const double h = grid.dx() / static_cast<double>(os);
  const double lambda = grid.wavelength();

  // The lag sum is periodic in u with period 1/(2h); the requested angles must
  // stay inside the unaliased half band.
  const double theta_end = theta_start + theta_step * static_cast<double>(count - 1);
  const double band = lambda / (4.0 * h);
  if (std::max(std::abs(theta_start), std::abs(theta_end)) > band * (1.0 + 1e-12)) {
    std::ostringstream os_msg;
    os_msg << "wdf: requested angles up to " << std::max(std::abs(theta_start), std::abs(theta_end))
           << " rad exceed the representable band " << band
           << " rad; increase oversample_factor or reduce dx";
    throw InvalidConfiguration(os_msg.str());
  }

  WdfDiagnostics local;
  WdfDiagnostics& d = diag ? *diag : local;
  check_local_frequency(field, std::max(std::abs(theta_start), std::abs(theta_end)), d.warnings);

  auto fine = [&] {
    auto w = windowed(field, opts.window);
    if (opts.interpolant == Interpolant::periodic) return detail::upsample(w, os);
    w.resize(2 * n, Complex{});
    auto up = detail::upsample(w, os);
    up.resize(n * os);
    return up;
  }();
  const std::size_t nf = fine.size();
  const std::size_t max_lag = (nf - 1) / 2 + 1;

  // W(x,u) = 2h sum_m r_m exp(-i 4 pi u m h), m in [-max_lag, max_lag], evaluated
  // on the angle samples via a chirp-z transform of the two-sided lag sequence.
  const double u0 = theta_start / lambda;
  const double du = theta_step / lambda;
  const std::size_t len = 2 * max_lag + 1;
  detail::ChirpZ czt(len, count, 4.0 * kPi * h * u0, 4.0 * kPi * h * du);

  std::vector<Complex> shift(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double phase = 4.0 * kPi * h * static_cast<double>(max_lag) *
                         (u0 + static_cast<double>(j) * du);
    shift[j] = {std::cos(phase), std::sin(phase)};
  }

  Array2D out(n, count);
  std::vector<Complex> lags(len);
  std::vector<Complex> spectrum(count);
  double max_re = 0.0;
  double max_im = 0.0;
  const double scale = 2.0 * h / lambda;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = os * i;
    std::fill(lags.begin(), lags.end(), Complex{});
    const std::size_t reach = std::min(c, nf - 1 - c);
    for (std::size_t m = 0; m <= reach; ++m) {
      lags[max_lag + m] = fine[c + m] * std::conj(fine[c - m]);
      lags[max_lag - m] = fine[c - m] * std::conj(fine[c + m]);
    }
    czt.apply(lags, spectrum);
    for (std::size_t j = 0; j < count; ++j) {
      const Complex w = spectrum[j] * shift[j] * scale;
      out(i, j) = w.real();
      max_re = std::max(max_re, std::abs(w.real()));
      max_im = std::max(max_im, std::abs(w.imag()));
    }
  }
  d.imaginary_residue = max_re > 0.0 ? max_im / max_re : 0.0;
  if (d.imaginary_residue >= 1e-9) {
    std::ostringstream os_msg;
    os_msg << "wdf: imaginary residue " << d.imaginary_residue << " of peak exceeds 1e-9";
    throw NumericalError(os_msg.str());
  }
  return out;
}

AugmentedLightField wdf_from_field(const ComplexField& field, const WdfOptions& opts,
                                   WdfDiagnostics* diag) {
  const auto& g = field.grid();
  return AugmentedLightField(
      g, wigner_samples(field, g.theta(0), g.dtheta(), g.theta_samples(), opts, diag));
}

AugmentedLightField analytic_wdf_two_pinholes(double a, double b, const PhaseSpaceGrid& grid) {
  if (a == b) {
    throw DegenerateInput("two pinholes: a == b is a single pinhole");
  }
  bool in_a = false;
  bool in_b = false;
  const std::size_t ia = grid.nearest_x(a, &in_a);
  const std::size_t ib = grid.nearest_x(b, &in_b);
  if (!in_a || !in_b) throw InvalidConfiguration("two pinholes: position outside the x window");
  if (ia == ib) throw DegenerateInput("two pinholes: both pinholes fall on the same sample");
  // Separation and midpoint follow the snapped nodes; an odd node gap splits
  // the virtual source over the two central nodes.
  const double sep = grid.x(ia) - grid.x(ib);
  const std::size_t lo = std::min(ia, ib) + (std::max(ia, ib) - std::min(ia, ib)) / 2;
  const bool split = (ia + ib) % 2 != 0;

  AugmentedLightField lf(grid);
  const double lambda = grid.wavelength();
  const double w = 1.0 / (grid.dx() * lambda);
  for (std::size_t j = 0; j < grid.theta_samples(); ++j) {
    lf(ia, j) += w;
    lf(ib, j) += w;
    const double v = 2.0 * w * std::cos(2.0 * kPi * sep * grid.theta(j) / lambda);
    if (split) {
      lf(lo, j) += 0.5 * v;
      lf(lo + 1, j) += 0.5 * v;
    } else {
      lf(lo, j) += v;
    }
  }
  return lf;
}

AugmentedLightField analytic_wdf_rect_aperture(double aperture, const PhaseSpaceGrid& grid) {
  if (!(aperture > 0.0)) throw InvalidConfiguration("rect aperture: A must be > 0");
  if (aperture > grid.x_extent()) {
    throw InvalidConfiguration("rect aperture: A exceeds the x window");
  }
  AugmentedLightField lf(grid);
  const double lambda = grid.wavelength();
  for (std::size_t i = 0; i < grid.x_samples(); ++i) {
    const double x = grid.x(i);
    const double width = 2.0 * aperture * triangle(x / (0.5 * aperture));
    if (width == 0.0) continue;
    for (std::size_t j = 0; j < grid.theta_samples(); ++j) {
      lf(i, j) = width * sinc(width * grid.theta(j) / lambda) / lambda;
    }
  }
  return lf;
}

}  // namespace alf::wdf
