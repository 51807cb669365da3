#pragma once

#include "alf/core.hpp"
#include "alf/elements.hpp"

namespace alf::fresnel {

/// Paraxial free-space propagation by the transfer-function method:
/// G(u) -> G(u) exp(-i pi lambda z u^2) on the periodic grid. The constant
/// phase exp(i 2 pi z / lambda) is dropped. Unitary, so energy is conserved.
///
/// Throws InvalidConfiguration for z < 0. Appends a warning when z exceeds
/// N dx^2 / lambda, beyond which the implied impulse response wraps around
/// the window unless the field's spectrum is narrow.
ComplexField fresnel_propagate(const ComplexField& field, double z, Warnings* warnings = nullptr);

/// Multiplies the field by the element's complex transmittance (same sign
/// conventions as the light-field transformers).
ComplexField apply_mask(const ComplexField& field, const ElementSpec& element);

/// Removes spatial frequencies with |lambda u| > theta_max (ideal low-pass).
ComplexField band_limit(const ComplexField& field, double theta_max);

/// Point source at x0 restricted to propagation angles |theta| <= theta_max:
/// the inverse transform of a flat angular spectrum, unit amplitude per unit u.
ComplexField band_limited_point(const PhaseSpaceGrid& grid, double x0, double theta_max);

}  // namespace alf::fresnel
