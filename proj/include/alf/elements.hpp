#pragma once

#include <string>
#include <variant>
#include <vector>

#include "alf/core.hpp"

namespace alf {

// Thin optical elements. Lengths in metres, phases in radians.

struct Pinhole {
  double x0 = 0.0;
};

struct TwoPinholes {
  double a = 0.0;
  double b = 0.0;
};

struct RectAperture {
  double width = 0.0;  // A; transmits |x| <= A/2
};

/// t(x) = (1 + m cos(2 pi x / p)) / 2.
struct AmplitudeGrating {
  double modulation = 1.0;
  double period = 0.0;
};

struct CodedAperture {
  ComplexField transmittance;
};

/// Linear phase alpha * x (alpha in rad/m).
struct Prism {
  double alpha = 0.0;
};

/// Thin converging lens for f > 0: t(x) = exp(-i pi x^2 / (lambda f)), so a ray at
/// height x is deflected by -x/f.
struct Lens {
  double focal_length = 0.0;
};

/// Phase alpha * x^3 (alpha in rad/m^3).
struct CubicPhase {
  double alpha = 0.0;
};

/// Phase phi0 * sin(2 pi x / p).
struct PhaseGrating {
  double phi0 = 0.0;
  double period = 0.0;
};

/// Arbitrary slowly varying phase, one sample per x node.
struct PhasePlate {
  std::vector<double> phase;
};

/// In-line hologram of a point at distance d recorded with an on-axis plane
/// reference; DC terms dropped.
/// Interference term between the two image lines in the hologram's kernel.
enum class CrossTerm {
  none,
  /// 2 cos((2 pi / lambda) [2d + x^2/d - d dtheta^2]), as usually quoted.
  published,
  /// 2 sqrt(2d / lambda) cos((2 pi / lambda) [2d + x^2/d - d dtheta^2] + pi/4),
  /// the exact Wigner cross term of the recorded transmittance.
  exact,
};

struct Hologram {
  double distance = 0.0;
  CrossTerm cross_term = CrossTerm::published;
};

using ElementSpec = std::variant<Pinhole, TwoPinholes, RectAperture, AmplitudeGrating,
                                 CodedAperture, Prism, Lens, CubicPhase, PhaseGrating,
                                 PhasePlate, Hologram>;

/// Short lowercase identifier, e.g. "lens" or "two_pinholes".
std::string element_tag(const ElementSpec& e);

/// Throws InvalidConfiguration on out-of-range parameters or grid mismatch.
void validate_element(const ElementSpec& e, const PhaseSpaceGrid& grid);

/// Complex transmittance sampled on the grid. Pinholes are single-sample spikes
/// of amplitude 1/dx (unit area) at the nearest node.
ComplexField transmittance(const ElementSpec& e, const PhaseSpaceGrid& grid);

/// Phase of a slowly varying phase element sampled on the grid; throws
/// InvalidConfiguration for elements that are not pure phase profiles.
std::vector<double> phase_profile(const ElementSpec& e, const PhaseSpaceGrid& grid);

}  // namespace alf
