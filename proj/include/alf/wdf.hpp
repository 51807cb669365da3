#pragma once

#include <cstddef>

#include "alf/core.hpp"

namespace alf::wdf {

enum class Window { none, raised_cosine };

/// Model of the field between samples used by the upsampling step.
enum class Interpolant {
  /// Trigonometric interpolation of the window as one period.
  periodic,
  /// Trigonometric interpolation after zero-padding to twice the length, so a
  /// field that vanishes outside the window is not wrapped onto itself.
  zero_padded,
};

struct WdfOptions {
  /// Trigonometric upsampling of the field before forming g(x+s) g*(x-s); one of 1, 2, 4.
  /// With factor 1 the lag spacing is dx and the unaliased angle band halves.
  int oversample_factor = 2;
  Window window = Window::none;
  Interpolant interpolant = Interpolant::periodic;
};

struct WdfDiagnostics {
  /// max |Im W| / max |Re W| before the imaginary part was discarded.
  double imaginary_residue = 0.0;
  Warnings warnings;
};

/// Discrete Wigner distribution of `field`, remapped to theta = lambda u and
/// scaled to radiance units L = W / lambda, sampled on the field grid.
///
/// Throws InvalidConfiguration when the theta window is wider than the band the
/// lag sampling can represent, and NumericalError if the result is not real to 1e-9.
AugmentedLightField wdf_from_field(const ComplexField& field, const WdfOptions& opts = {},
                                   WdfDiagnostics* diag = nullptr);

/// Same distribution evaluated at angles theta_start + k * theta_step, k < count,
/// for every x sample. Rows are x, columns the requested angles.
Array2D wigner_samples(const ComplexField& field, double theta_start, double theta_step,
                       std::size_t count, const WdfOptions& opts = {},
                       WdfDiagnostics* diag = nullptr);

/// Closed-form two-pinhole distribution: delta(x-a) + delta(x-b) plus the
/// virtual source 2 delta(x-(a+b)/2) cos(2 pi (a-b) theta / lambda).
/// x deltas land on the nearest node with weight 1/dx.
AugmentedLightField analytic_wdf_two_pinholes(double a, double b, const PhaseSpaceGrid& grid);

/// Closed-form distribution of rect(x/A): (2A - 4|x|) sinc((2A - 4|x|) theta / lambda),
/// zero for |x| > A/2.
AugmentedLightField analytic_wdf_rect_aperture(double aperture, const PhaseSpaceGrid& grid);

/// sin(pi t) / (pi t).
double sinc(double t);

/// 1 - |t| inside [-1, 1], else 0.
double triangle(double t);

}  // namespace alf::wdf
