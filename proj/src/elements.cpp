#include "alf/elements.hpp"

#include <algorithm>
#include <cmath>

namespace alf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void deposit_spike(ComplexField& t, double x, const char* what) {
  bool inside = false;
  const std::size_t i = t.grid().nearest_x(x, &inside);
  if (!inside) throw InvalidConfiguration(std::string(what) + ": position outside the x window");
  t[i] += 1.0 / t.grid().dx();
}

}  // namespace

std::string element_tag(const ElementSpec& e) {
  return std::visit(overloaded{
                        [](const Pinhole&) { return std::string("pinhole"); },
                        [](const TwoPinholes&) { return std::string("two_pinholes"); },
                        [](const RectAperture&) { return std::string("rect_aperture"); },
                        [](const AmplitudeGrating&) { return std::string("amplitude_grating"); },
                        [](const CodedAperture&) { return std::string("coded_aperture"); },
                        [](const Prism&) { return std::string("prism"); },
                        [](const Lens&) { return std::string("lens"); },
                        [](const CubicPhase&) { return std::string("cubic_phase"); },
                        [](const PhaseGrating&) { return std::string("phase_grating"); },
                        [](const PhasePlate&) { return std::string("phase_plate"); },
                        [](const Hologram&) { return std::string("hologram"); },
                    },
                    e);
}

void validate_element(const ElementSpec& e, const PhaseSpaceGrid& grid) {
  auto fail = [](const std::string& msg) { throw InvalidConfiguration(msg); };
  std::visit(overloaded{
                 [&](const Pinhole& p) {
                   bool in = false;
                   grid.nearest_x(p.x0, &in);
                   if (!in) fail("pinhole: x0 outside the x window");
                 },
                 [&](const TwoPinholes& p) {
                   bool ia = false;
                   bool ib = false;
                   grid.nearest_x(p.a, &ia);
                   grid.nearest_x(p.b, &ib);
                   if (!ia || !ib) fail("two_pinholes: position outside the x window");
                 },
                 [&](const RectAperture& r) {
                   if (!(r.width > 0.0)) fail("rect_aperture: A must be > 0");
                 },
                 [&](const AmplitudeGrating& g) {
                   if (!(g.modulation >= 0.0 && g.modulation <= 1.0))
                     fail("amplitude_grating: m must lie in [0, 1]");
                   if (!(g.period > 0.0)) fail("amplitude_grating: p must be > 0");
                 },
                 [&](const CodedAperture& c) {
                   require_same_grid(c.transmittance.grid(), grid, "coded_aperture");
                 },
                 [&](const Prism& p) {
                   if (!std::isfinite(p.alpha)) fail("prism: alpha must be finite");
                 },
                 [&](const Lens& l) {
                   if (l.focal_length == 0.0 || !std::isfinite(l.focal_length))
                     fail("lens: f must be finite and non-zero");
                 },
                 [&](const CubicPhase& c) {
                   if (!std::isfinite(c.alpha)) fail("cubic_phase: alpha must be finite");
                 },
                 [&](const PhaseGrating& g) {
                   if (!(g.phi0 >= 0.0)) fail("phase_grating: phi0 must be >= 0");
                   if (!(g.period > 0.0)) fail("phase_grating: p must be > 0");
                 },
                 [&](const PhasePlate& p) {
                   if (p.phase.size() != grid.x_samples())
                     fail("phase_plate: phase profile length does not match the grid");
                 },
                 [&](const Hologram& h) {
                   if (!(h.distance > 0.0)) fail("hologram: d must be > 0");
                 },
             },
             e);
}

ComplexField transmittance(const ElementSpec& e, const PhaseSpaceGrid& grid) {
  validate_element(e, grid);
  if (const auto* c = std::get_if<CodedAperture>(&e)) return c->transmittance;

  ComplexField t(grid);
  const double lambda = grid.wavelength();
  const std::size_t n = grid.x_samples();
  std::visit(overloaded{
                 [&](const Pinhole& p) { deposit_spike(t, p.x0, "pinhole"); },
                 [&](const TwoPinholes& p) {
                   deposit_spike(t, p.a, "two_pinholes");
                   deposit_spike(t, p.b, "two_pinholes");
                 },
                 [&](const RectAperture& r) {
                   // Fraction of each cell [x - dx/2, x + dx/2] inside the opening.
                   const double h = 0.5 * grid.dx();
                   for (std::size_t i = 0; i < n; ++i) {
                     const double x = grid.x(i);
                     const double lo = std::max(x - h, -0.5 * r.width);
                     const double hi = std::min(x + h, 0.5 * r.width);
                     t[i] = std::max(0.0, hi - lo) / grid.dx();
                   }
                 },
                 [&](const AmplitudeGrating& g) {
                   for (std::size_t i = 0; i < n; ++i)
                     t[i] = 0.5 * (1.0 + g.modulation * std::cos(2.0 * kPi * grid.x(i) / g.period));
                 },
                 [&](const CodedAperture&) {},
                 [&](const Hologram& h) {
                   // E_r* E_o + E_r E_o* at z = 0.
                   for (std::size_t i = 0; i < n; ++i) {
                     const double x = grid.x(i);
                     const double psi = 2.0 * kPi * h.distance / lambda + kPi * x * x / (lambda * h.distance);
                     t[i] = 2.0 * std::cos(psi);
                   }
                 },
                 [&](const auto& phase_element) {
                   const auto phi = phase_profile(ElementSpec{phase_element}, grid);
                   for (std::size_t i = 0; i < n; ++i) t[i] = std::polar(1.0, phi[i]);
                 },
             },
             e);
  return t;
}

std::vector<double> phase_profile(const ElementSpec& e, const PhaseSpaceGrid& grid) {
  validate_element(e, grid);
  const std::size_t n = grid.x_samples();
  const double lambda = grid.wavelength();
  std::vector<double> phi(n, 0.0);
  std::visit(overloaded{
                 [&](const Prism& p) {
                   for (std::size_t i = 0; i < n; ++i) phi[i] = p.alpha * grid.x(i);
                 },
                 [&](const Lens& l) {
                   for (std::size_t i = 0; i < n; ++i) {
                     const double x = grid.x(i);
                     phi[i] = -kPi * x * x / (lambda * l.focal_length);
                   }
                 },
                 [&](const CubicPhase& c) {
                   for (std::size_t i = 0; i < n; ++i) {
                     const double x = grid.x(i);
                     phi[i] = c.alpha * x * x * x;
                   }
                 },
                 [&](const PhaseGrating& g) {
                   for (std::size_t i = 0; i < n; ++i)
                     phi[i] = g.phi0 * std::sin(2.0 * kPi * grid.x(i) / g.period);
                 },
                 [&](const PhasePlate& p) { phi = p.phase; },
                 [&](const auto&) {
                   throw InvalidConfiguration(element_tag(e) + ": not a pure phase element");
                 },
             },
             e);
  return phi;
}

}  // namespace alf
