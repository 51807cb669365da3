#include "alf/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "alf/fresnel.hpp"
#include "alf/propagation.hpp"
#include "alf/transformers.hpp"
#include "alf/wdf.hpp"
#include "fft.hpp"

namespace alf::scenarios {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string abort_message(std::size_t stage, double fraction) {
  std::ostringstream os;
  os << "scenario aborted at stage " << stage << ": " << fraction * 100.0
     << "% of the light field left the window (grid too small)";
  return os.str();
}

PhaseSpaceGrid padded_grid(const PhaseSpaceGrid& g, std::size_t pad) {
  return PhaseSpaceGrid::make(g.x_samples() * pad, g.x_extent() * static_cast<double>(pad),
                              g.theta_samples(), g.theta_extent(), g.wavelength(),
                              g.paraxial_limit());
}

std::size_t window_offset(const PhaseSpaceGrid& g, std::size_t pad) {
  return (g.x_samples() * pad - g.x_samples()) / 2;
}

ComplexField embed_field(const ComplexField& f, const PhaseSpaceGrid& padded, std::size_t offset) {
  ComplexField out(padded);
  for (std::size_t i = 0; i < f.samples().size(); ++i) out[offset + i] = f[i];
  return out;
}

ComplexField crop_field(const ComplexField& f, const PhaseSpaceGrid& window, std::size_t offset) {
  ComplexField out(window);
  for (std::size_t i = 0; i < window.x_samples(); ++i) out[i] = f[offset + i];
  return out;
}

double magnitude(const AugmentedLightField& lf) {
  double s = 0.0;
  for (double v : lf.radiance().data()) s += std::abs(v);
  return s * lf.grid().dx() * lf.grid().dtheta();
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Cosine-squared roll-off from 1 at |t| <= 1 - taper to 0 at |t| = 1.
double taper_weight(double t, double taper) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  const double knee = 1.0 - taper;
  if (a <= knee || taper <= 0.0) return 1.0;
  const double c = std::cos(0.5 * kPi * (a - knee) / taper);
  return c * c;
}

}  // namespace

ScenarioAborted::ScenarioAborted(std::size_t stage, double fraction)
    : std::runtime_error(abort_message(stage, fraction)), stage_(stage), fraction_(fraction) {}

void validate_train(const OpticalTrain& train) {
  if (train.stages.empty()) throw InvalidConfiguration("optical train: at least one stage is required");
  for (std::size_t i = 0; i < train.stages.size(); ++i) {
    std::visit(overloaded{
                   [&](const Propagate& p) {
                     if (!(p.z >= 0.0) || !std::isfinite(p.z)) {
                       throw InvalidConfiguration("optical train: stage " + std::to_string(i) +
                                                  " has z < 0");
                     }
                   },
                   [&](const ElementStage& e) { validate_element(e.element, train.grid); },
               },
               train.stages[i]);
  }
  if (const auto* p = std::get_if<PointSource>(&train.source)) {
    bool inside = false;
    train.grid.nearest_x(p->x0, &inside);
    if (!inside) throw InvalidConfiguration("point source: x0 outside the x window");
    if (!(p->half_angle > 0.0) || p->half_angle > 0.5 * train.grid.theta_extent()) {
      throw InvalidConfiguration("point source: half_angle must lie in (0, theta_extent / 2]");
    }
    if (!(p->taper >= 0.0 && p->taper <= 1.0)) {
      throw InvalidConfiguration("point source: taper must lie in [0, 1]");
    }
  }
  if (const auto* f = std::get_if<FieldSource>(&train.source)) {
    require_same_grid(f->field.grid(), train.grid, "field source");
  }
  if (train.oracle.pad_factor == 0) throw InvalidConfiguration("oracle: pad_factor must be >= 1");
  if ((train.grid.x_samples() * (train.oracle.pad_factor - 1)) % 2 != 0) {
    throw InvalidConfiguration("oracle: x_samples * (pad_factor - 1) must be even");
  }
}

ComplexField source_field(const Source& source, const PhaseSpaceGrid& grid) {
  return std::visit(
      overloaded{
          [&](const PointSource& p) {
            const std::size_t n = grid.x_samples();
            const double du = 1.0 / (static_cast<double>(n) * grid.dx());
            std::vector<Complex> spec(n);
            for (std::size_t k = 0; k < n; ++k) {
              const double kk = k <= n / 2 ? static_cast<double>(k)
                                           : static_cast<double>(k) - static_cast<double>(n);
              const double u = kk * du;
              const double w = taper_weight(grid.u_to_theta(u) / p.half_angle, p.taper);
              if (w == 0.0) continue;
              spec[k] = du * w * std::polar(1.0, -2.0 * kPi * u * (p.x0 - grid.x(0)));
            }
            detail::dft_inplace(spec, FFTW_BACKWARD);
            return ComplexField(grid, std::move(spec));
          },
          [&](const PlaneWave& p) {
            const std::size_t j = grid.nearest_theta(p.theta0);
            const double u = grid.u(j);
            ComplexField f(grid);
            for (std::size_t i = 0; i < grid.x_samples(); ++i) {
              f[i] = std::polar(1.0, 2.0 * kPi * u * grid.x(i));
            }
            return f;
          },
          [&](const FieldSource& s) {
            require_same_grid(s.field.grid(), grid, "field source");
            return s.field;
          },
      },
      source);
}

AugmentedLightField source_light_field(const Source& source, const PhaseSpaceGrid& grid) {
  if (const auto* p = std::get_if<PlaneWave>(&source)) return plane_wave_light_field(grid, p->theta0);
  if (std::holds_alternative<PointSource>(source)) {
    // Built on a wider grid and cropped so the window holds a non-periodic copy.
    const std::size_t pad = 4;
    const auto wide = padded_grid(grid, pad);
    const auto f = crop_field(source_field(source, wide), grid, window_offset(grid, pad));
    return wdf::wdf_from_field(f);
  }
  return wdf::wdf_from_field(source_field(source, grid));
}

TrainResult run_train(const OpticalTrain& train) {
  validate_train(train);
  const auto& g = train.grid;
  const bool keep = train.observation == Observation::full_phase_space;

  TrainResult res{source_light_field(train.source, g),
                  ComparisonReport{IntensityProfile{g, {}}, IntensityProfile{g, {}}, false, 0.0, 0, 0.0, {}},
                  {}};
  auto& rep = res.report;
  rep.warnings = g.warnings();
  if (keep) res.snapshots.push_back(res.field);

  double kept = 1.0;
  for (std::size_t i = 0; i < train.stages.size(); ++i) {
    double fraction = 0.0;
    std::visit(overloaded{
                   [&](const Propagate& p) {
                     auto s = propagation::shear_propagate(res.field, p.z);
                     fraction = s.truncation_fraction;
                     rep.warnings.insert(rep.warnings.end(), s.warnings.begin(), s.warnings.end());
                     res.field = std::move(s.field);
                   },
                   [&](const ElementStage& e) {
                     const auto t = train.kernels == KernelMode::canonical
                                        ? transformers::canonical_transformer(e.element, g)
                                        : transformers::transformer_from_transmittance(
                                              transmittance(e.element, g));
                     rep.warnings.insert(rep.warnings.end(), t.warnings().begin(), t.warnings().end());
                     auto r = transformers::apply_transformer(res.field, t);
                     const double total = r.angular_loss + magnitude(r.field);
                     fraction = total > 0.0 ? r.angular_loss / total : 0.0;
                     res.field = std::move(r.field);
                   },
               },
               train.stages[i]);
    if (fraction > train.abort_fraction) throw ScenarioAborted(i, fraction);
    kept *= 1.0 - fraction;
    if (keep) res.snapshots.push_back(res.field);
  }
  rep.truncation_loss = 1.0 - kept;
  rep.alf_intensity = project_intensity(res.field);
  if (!train.oracle.enabled) return res;

  const std::size_t pad = train.oracle.pad_factor;
  const auto wide = padded_grid(g, pad);
  const std::size_t off = window_offset(g, pad);
  ComplexField field = std::holds_alternative<PointSource>(train.source)
                           ? source_field(train.source, wide)
                           : embed_field(source_field(train.source, g), wide, off);
  for (const auto& stage : train.stages) {
    std::visit(overloaded{
                   [&](const Propagate& p) { field = fresnel::fresnel_propagate(field, p.z, &rep.warnings); },
                   [&](const ElementStage& e) {
                     const auto t = embed_field(transmittance(e.element, g), wide, off);
                     for (std::size_t k = 0; k < field.samples().size(); ++k) field[k] *= t[k];
                   },
               },
               stage);
  }
  rep.oracle_intensity.values = crop_field(field, g, off).intensity();
  rep.oracle_run = true;
  rep.relative_l2_error = relative_l2(rep.alf_intensity.values, rep.oracle_intensity.values);
  rep.peak_position_offset = static_cast<long long>(argmax(rep.alf_intensity.values)) -
                             static_cast<long long>(argmax(rep.oracle_intensity.values));
  return res;
}

double centroid(std::span<const double> p) {
  double s = 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    s += p[i];
    m += static_cast<double>(i) * p[i];
  }
  if (s == 0.0) throw DegenerateInput("centroid: profile sums to zero");
  return m / s;
}

double skewness(std::span<const double> p) {
  const double mu = centroid(p);
  double s = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(i) - mu;
    s += p[i];
    m2 += d * d * p[i];
    m3 += d * d * d * p[i];
  }
  m2 /= s;
  m3 /= s;
  if (!(m2 > 0.0)) throw DegenerateInput("skewness: profile has zero spread");
  return m3 / std::pow(m2, 1.5);
}

double aligned_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw InvalidConfiguration("aligned_correlation: profiles must have equal non-zero length");
  }
  const double shift = centroid(a) - centroid(b);
  const std::size_t n = a.size();
  std::vector<double> bs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    // bs[i] = b[i - shift] by linear interpolation.
    const double src = static_cast<double>(i) - shift;
    const double base = std::floor(src);
    const double frac = src - base;
    const auto k = static_cast<long long>(base);
    auto at = [&](long long q) {
      return q >= 0 && q < static_cast<long long>(n) ? b[static_cast<std::size_t>(q)] : 0.0;
    };
    bs[i] = (1.0 - frac) * at(k) + frac * at(k + 1);
  }
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += bs[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = bs[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DegenerateInput("aligned_correlation: constant profile");
  return sab / std::sqrt(saa * sbb);
}

CubicSweepResult cubic_phase_psf_sweep(const CubicSweepConfig& c) {
  if (!(c.focal_length > 0.0) || !(c.aperture > 0.0) || !(c.image_distance > c.focal_length)) {
    throw InvalidConfiguration("cubic sweep: need f > 0, A > 0 and s' > f");
  }
  if (c.defocus.empty()) throw InvalidConfiguration("cubic sweep: defocus list is empty");
  const double edge = 3.0 * c.grid.wavelength() * std::abs(c.alpha) * 0.25 * c.aperture * c.aperture /
                      (2.0 * kPi);
  if (edge > 0.5 * c.grid.theta_extent()) {
    throw InvalidConfiguration("cubic sweep: cubic deflection at the aperture edge leaves the theta window");
  }
  const double s0 = 1.0 / (1.0 / c.focal_length - 1.0 / c.image_distance);

  CubicSweepResult out;
  for (double d : c.defocus) {
    OpticalTrain train{c.grid, PointSource{0.0, c.source_half_angle}, {}, Observation::intensity,
                       c.oracle, c.kernels};
    const double s = s0 + d;
    if (!(s > 0.0)) throw InvalidConfiguration("cubic sweep: defocused object distance must be > 0");
    train.stages = {Propagate{s}, ElementStage{Lens{c.focal_length}}, ElementStage{CubicPhase{c.alpha}},
                    ElementStage{RectAperture{c.aperture}}, Propagate{c.image_distance}};
    auto r = run_train(train);
    out.alf_psfs.push_back(std::move(r.report.alf_intensity));
    if (r.report.oracle_run) out.oracle_psfs.push_back(std::move(r.report.oracle_intensity));
  }

  auto similarity = [](const std::vector<IntensityProfile>& psfs) {
    Array2D s(psfs.size(), psfs.size());
    for (std::size_t i = 0; i < psfs.size(); ++i) {
      for (std::size_t j = 0; j < psfs.size(); ++j) {
        s(i, j) = aligned_correlation(psfs[i].values, psfs[j].values);
      }
    }
    return s;
  };
  out.alf_similarity = similarity(out.alf_psfs);
  out.oracle_similarity = similarity(out.oracle_psfs);
  for (const auto& p : out.alf_psfs) out.alf_skewness.push_back(skewness(p.values));
  for (const auto& p : out.oracle_psfs) out.oracle_skewness.push_back(skewness(p.values));
  return out;
}

Hologram hologram_record(double distance) {
  if (!(distance > 0.0)) throw InvalidConfiguration("hologram: d must be > 0");
  return Hologram{distance, CrossTerm::published};
}

}  // namespace alf::scenarios
