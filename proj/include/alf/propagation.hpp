#pragma once

#include "alf/core.hpp"

namespace alf::propagation {

enum class Interpolation {
  /// Per-row Fourier shift on a zero-padded row; exact for band-limited rows.
  band_limited,
  /// Two-tap linear interpolation; no ringing on delta-deposited columns.
  linear,
};

struct ShearResult {
  AugmentedLightField field;
  /// Sum of |radiance| dx dtheta pushed outside the x window.
  double truncation_loss = 0.0;
  /// Share of the input that left the window, in [0, 1]: squared-radiance energy
  /// for band-limited shear (unitary per row), sum of |radiance| for linear.
  double truncation_fraction = 0.0;
  Warnings warnings;
};

/// Free-space transport over distance z: L_out(x, theta) = L_in(x - z theta, theta).
/// A ray at angle theta advances by z*theta; content leaving the window is
/// truncated (never wrapped) and reported.
ShearResult shear_propagate(const AugmentedLightField& lf, double z,
                            Interpolation interp = Interpolation::band_limited);

struct RotationResult {
  AugmentedLightField field;
  /// Metres of x per radian of theta used to map one axis onto the other.
  double scale = 0.0;
};

/// Far-field limit: a 90 degree phase-space rotation,
/// L_out(x, theta) = L_in(-scale * theta, x / scale) with scale = x_extent / theta_extent.
/// Requires x_samples == theta_samples so the rotation is an index permutation;
/// the sample at the open end of each half-open axis has no partner and is zeroed.
RotationResult fraunhofer_rotate(const AugmentedLightField& lf);

}  // namespace alf::propagation
