#include "alf/transformers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"

namespace alf::transformers {

LightFieldTransformer::LightFieldTransformer(PhaseSpaceGrid grid, Array2D kernel, std::string tag)
    : grid_(std::move(grid)), kernel_(std::move(kernel)), tag_(std::move(tag)) {
  if (kernel_.rows() != grid_.x_samples() || kernel_.cols() != 2 * grid_.theta_samples() - 1) {
    throw InvalidConfiguration("transformer: kernel shape must be x_samples x (2 theta_samples - 1)");
  }
}

namespace {

// Field resampled at x + shift * dx by trigonometric interpolation, over the
// window or over the window padded with as many zeros.
ComplexField shifted_field(const ComplexField& f, double shift, wdf::Interpolant interpolant) {
  const std::size_t len = f.samples().size();
  std::vector<Complex> spec(f.samples().begin(), f.samples().end());
  if (interpolant == wdf::Interpolant::zero_padded) spec.resize(2 * len, Complex{});
  const std::size_t n = spec.size();
  detail::dft_inplace(spec, FFTW_FORWARD);
  for (std::size_t k = 0; k < n; ++k) {
    const double kk = k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
    const double phase = 2.0 * kPi * kk * shift / static_cast<double>(n);
    spec[k] *= (n % 2 == 0 && k == n / 2) ? Complex{std::cos(phase), 0.0}
                                          : Complex{std::cos(phase), std::sin(phase)};
  }
  detail::dft_inplace(spec, FFTW_BACKWARD);
  spec.resize(len);
  for (auto& v : spec) v /= static_cast<double>(n);
  return ComplexField(f.grid(), std::move(spec));
}

}  // namespace

LightFieldTransformer transformer_from_transmittance(const ComplexField& t,
                                                     const wdf::WdfOptions& opts, RowSampling rows) {
  const auto& g = t.grid();
  const std::size_t m = g.theta_samples();
  const double start = -static_cast<double>(m - 1) * g.dtheta();
  wdf::WdfDiagnostics diag;
  auto kernel = wdf::wigner_samples(t, start, g.dtheta(), 2 * m - 1, opts, &diag);
  if (rows == RowSampling::cell_average) {
    // half(i, .) is the distribution at x_i + dx/2.
    const auto half = wdf::wigner_samples(shifted_field(t, 0.5, opts.interpolant), start, g.dtheta(), 2 * m - 1, opts);
    Array2D avg(kernel.rows(), kernel.cols());
    for (std::size_t i = 0; i < kernel.rows(); ++i) {
      const std::size_t below = i == 0 ? 0 : i - 1;
      for (std::size_t k = 0; k < kernel.cols(); ++k) {
        avg(i, k) = 0.5 * kernel(i, k) + 0.25 * (half(i, k) + half(below, k));
      }
    }
    kernel = std::move(avg);
  }
  LightFieldTransformer out(g, std::move(kernel), "coded_aperture");
  out.warnings() = std::move(diag.warnings);
  return out;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Deposits weight * delta(dtheta - angle) into row ix; returns false if the
// angle falls outside the relative-angle range.
bool deposit_angle(LightFieldTransformer& t, std::size_t ix, double angle, double weight) {
  const double pos = angle / t.grid().dtheta() + static_cast<double>(t.zero_index());
  const double k = std::round(pos);
  if (k < 0.0 || k > static_cast<double>(t.relative_samples() - 1)) return false;
  t.kernel()(ix, static_cast<std::size_t>(k)) += weight / t.grid().dtheta();
  return true;
}

class ClipTracker {
 public:
  void record(bool ok, const std::string& label) {
    if (!ok) {
      ++count_;
      if (labels_.size() < 8 && std::find(labels_.begin(), labels_.end(), label) == labels_.end())
        labels_.push_back(label);
    }
  }
  void flush(LightFieldTransformer& t) const {
    if (count_ == 0) return;
    std::ostringstream os;
    os << t.tag() << ": " << count_ << " delta deposits fell outside the relative-angle range";
    if (!labels_.empty()) {
      os << "; lost orders:";
      for (const auto& l : labels_) os << ' ' << l;
    }
    t.warnings().push_back(os.str());
  }

 private:
  std::size_t count_ = 0;
  std::vector<std::string> labels_;
};

// Deflection (lambda / 2 pi) dphi/dx at each node, by central differences.
std::vector<double> deflection_from_phase(const std::vector<double>& phi, const PhaseSpaceGrid& g) {
  const std::size_t n = phi.size();
  std::vector<double> out(n);
  const double s = g.wavelength() / (2.0 * kPi);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    out[i] = s * (phi[hi] - phi[lo]) / (static_cast<double>(hi - lo) * g.dx());
  }
  return out;
}

double bessel_j(int order, double x) {
  const int a = std::abs(order);
  const double v = std::cyl_bessel_j(static_cast<double>(a), x);
  return (order < 0 && (a % 2) != 0) ? -v : v;
}

void fill_phase_grating(LightFieldTransformer& t, const PhaseGrating& pg, ClipTracker& clips) {
  const auto& g = t.grid();
  const double lambda = g.wavelength();
  // t(x) = sum_n J_n(phi0) exp(i 2 pi n x / p); the pair (n + m, n) places weight
  // J_{m+n} J_n exp(i 2 pi m x / p) at dtheta = lambda (m + 2n) / (2p).
  const int nmax = static_cast<int>(std::ceil(pg.phi0)) + 16;
  std::vector<double> jn(2 * nmax + 1);
  for (int n = -nmax; n <= nmax; ++n) jn[n + nmax] = bessel_j(n, pg.phi0);
  for (int order = -2 * nmax; order <= 2 * nmax; ++order) {
    const double angle = lambda * order / (2.0 * pg.period);
    bool any = false;
    std::vector<std::pair<int, double>> terms;  // (m, J_{m+n} J_n)
    for (int n = -nmax; n <= nmax; ++n) {
      const int m = order - 2 * n;
      const int q = m + n;
      if (q < -nmax || q > nmax) continue;
      const double w = jn[q + nmax] * jn[n + nmax];
      if (std::abs(w) < 1e-17) continue;
      terms.emplace_back(m, w);
      any = true;
    }
    if (!any) continue;
    std::ostringstream label;
    label << order;
    for (std::size_t ix = 0; ix < g.x_samples(); ++ix) {
      double weight = 0.0;
      for (const auto& [m, w] : terms) weight += w * std::cos(2.0 * kPi * m * g.x(ix) / pg.period);
      if (weight == 0.0) continue;
      clips.record(deposit_angle(t, ix, angle, weight), label.str());
    }
  }
}

void fill_amplitude_grating(LightFieldTransformer& t, const AmplitudeGrating& ag, ClipTracker& clips) {
  const auto& g = t.grid();
  const double lambda = g.wavelength();
  const double m = ag.modulation;
  const double p = ag.period;
  for (std::size_t ix = 0; ix < g.x_samples(); ++ix) {
    const double x = g.x(ix);
    const double c1 = std::cos(2.0 * kPi * x / p);
    const double c2 = std::cos(4.0 * kPi * x / p);
    clips.record(deposit_angle(t, ix, 0.0, 0.25 * (1.0 + 0.5 * m * m * c2)), "0");
    if (m != 0.0) {
      clips.record(deposit_angle(t, ix, lambda / (2.0 * p), 0.25 * m * c1), "+1/2");
      clips.record(deposit_angle(t, ix, -lambda / (2.0 * p), 0.25 * m * c1), "-1/2");
      clips.record(deposit_angle(t, ix, lambda / p, m * m / 16.0), "+1");
      clips.record(deposit_angle(t, ix, -lambda / p, m * m / 16.0), "-1");
    }
  }
}

void fill_deflection(LightFieldTransformer& t, const std::vector<double>& deflection,
                     ClipTracker& clips) {
  for (std::size_t ix = 0; ix < deflection.size(); ++ix) {
    clips.record(deposit_angle(t, ix, deflection[ix], 1.0), "ray");
  }
}

void fill_column(LightFieldTransformer& t, std::size_t ix, double weight) {
  for (std::size_t k = 0; k < t.relative_samples(); ++k) t.kernel()(ix, k) += weight;
}

}  // namespace

LightFieldTransformer canonical_transformer(const ElementSpec& element, const PhaseSpaceGrid& g) {
  validate_element(element, g);
  if (const auto* c = std::get_if<CodedAperture>(&element)) {
    return transformer_from_transmittance(c->transmittance);
  }

  const std::size_t n = g.x_samples();
  const std::size_t m = g.theta_samples();
  const double lambda = g.wavelength();
  LightFieldTransformer t(g, Array2D(n, 2 * m - 1), element_tag(element));
  ClipTracker clips;

  std::visit(
      overloaded{
          [&](const Pinhole& p) { fill_column(t, g.nearest_x(p.x0), 1.0 / (g.dx() * lambda)); },
          [&](const TwoPinholes& p) {
            if (p.a == p.b) throw DegenerateInput("two_pinholes: a == b is a single pinhole");
            const std::size_t ia = g.nearest_x(p.a);
            const std::size_t ib = g.nearest_x(p.b);
            if (ia == ib) throw DegenerateInput("two_pinholes: both pinholes fall on the same sample");
            const double sep = g.x(ia) - g.x(ib);
            const std::size_t lo = std::min(ia, ib) + (std::max(ia, ib) - std::min(ia, ib)) / 2;
            const bool split = (ia + ib) % 2 != 0;
            const double w = 1.0 / (g.dx() * lambda);
            fill_column(t, ia, w);
            fill_column(t, ib, w);
            for (std::size_t k = 0; k < t.relative_samples(); ++k) {
              const double v = 2.0 * w * std::cos(2.0 * kPi * sep * t.relative_angle(k) / lambda);
              if (split) {
                t.kernel()(lo, k) += 0.5 * v;
                t.kernel()(lo + 1, k) += 0.5 * v;
              } else {
                t.kernel()(lo, k) += v;
              }
            }
          },
          [&](const RectAperture& r) {
            for (std::size_t ix = 0; ix < n; ++ix) {
              const double width = 2.0 * r.width * wdf::triangle(g.x(ix) / (0.5 * r.width));
              if (width == 0.0) continue;
              for (std::size_t k = 0; k < t.relative_samples(); ++k) {
                t.kernel()(ix, k) = width * wdf::sinc(width * t.relative_angle(k) / lambda) / lambda;
              }
            }
          },
          [&](const AmplitudeGrating& ag) { fill_amplitude_grating(t, ag, clips); },
          [&](const CodedAperture&) {},
          [&](const PhaseGrating& pg) { fill_phase_grating(t, pg, clips); },
          [&](const Hologram& h) {
            const double d = h.distance;
            const double amp = h.cross_term == CrossTerm::exact ? 2.0 * std::sqrt(2.0 * d / lambda) : 2.0;
            const double offset = h.cross_term == CrossTerm::exact ? 0.25 * kPi : 0.0;
            for (std::size_t ix = 0; ix < n; ++ix) {
              const double x = g.x(ix);
              clips.record(deposit_angle(t, ix, x / d, 1.0), "virtual image");
              clips.record(deposit_angle(t, ix, -x / d, 1.0), "real image");
              if (h.cross_term == CrossTerm::none) continue;
              for (std::size_t k = 0; k < t.relative_samples(); ++k) {
                const double th = t.relative_angle(k);
                // Reduce the large 2d/lambda part exactly before adding the rest.
                const double base = std::remainder(4.0 * kPi * d / lambda, 2.0 * kPi);
                const double phase = base + 2.0 * kPi / lambda * (x * x / d - d * th * th) + offset;
                t.kernel()(ix, k) += amp * std::cos(phase);
              }
            }
          },
          [&](const Lens& l) {
            std::vector<double> defl(n);
            for (std::size_t ix = 0; ix < n; ++ix) defl[ix] = -g.x(ix) / l.focal_length;
            fill_deflection(t, defl, clips);
          },
          [&](const Prism& p) {
            fill_deflection(t, std::vector<double>(n, lambda * p.alpha / (2.0 * kPi)), clips);
          },
          [&](const CubicPhase& c) {
            std::vector<double> defl(n);
            for (std::size_t ix = 0; ix < n; ++ix) {
              const double x = g.x(ix);
              defl[ix] = 3.0 * lambda * c.alpha * x * x / (2.0 * kPi);
            }
            fill_deflection(t, defl, clips);
          },
          [&](const PhasePlate& pp) { fill_deflection(t, deflection_from_phase(pp.phase, g), clips); },
      },
      element);
  clips.flush(t);
  return t;
}

LightFieldTransformer shield_transformer(std::span<const double> attenuation,
                                         const PhaseSpaceGrid& g) {
  if (attenuation.size() != g.x_samples()) {
    throw InvalidConfiguration("shield: attenuation length does not match the grid");
  }
  LightFieldTransformer t(g, Array2D(g.x_samples(), 2 * g.theta_samples() - 1), "shield");
  for (std::size_t ix = 0; ix < g.x_samples(); ++ix) {
    if (!(attenuation[ix] >= 0.0 && attenuation[ix] <= 1.0)) {
      throw InvalidConfiguration("shield: attenuation must lie in [0, 1]");
    }
    t.kernel()(ix, t.zero_index()) = attenuation[ix] / g.dtheta();
  }
  return t;
}

namespace {

std::size_t count_nonzero(std::span<const double> v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](double x) { return x != 0.0; }));
}

}  // namespace

TransformResult apply_transformer(const AugmentedLightField& in, const LightFieldTransformer& t) {
  require_same_grid(in.grid(), t.grid(), "apply_transformer");
  const auto& g = in.grid();
  const std::size_t n = g.x_samples();
  const std::size_t m = g.theta_samples();
  const std::size_t km = 2 * m - 1;
  const std::size_t zero = m - 1;
  const double dth = g.dtheta();

  TransformResult res{AugmentedLightField(g), 0.0};
  const std::size_t p = detail::fast_fft_size(3 * m - 2);
  detail::FftPlan fa(p, FFTW_FORWARD);
  detail::FftPlan fb(p, FFTW_FORWARD);
  detail::FftPlan inv(p, FFTW_BACKWARD);
  const double dense_cost = 3.0 * static_cast<double>(p) * std::log2(static_cast<double>(p)) * 4.0;
  double lost = 0.0;

  for (std::size_t ix = 0; ix < n; ++ix) {
    const auto lrow = in.radiance().row(ix);
    const auto trow = t.kernel().row(ix);
    auto orow = res.field.radiance().row(ix);
    const std::size_t nl = count_nonzero(lrow);
    const std::size_t nt = count_nonzero(trow);
    if (nl == 0 || nt == 0) continue;

    if (static_cast<double>(std::min(nl, nt)) * static_cast<double>(m) < dense_cost) {
      if (nl <= nt) {
        for (std::size_t j1 = 0; j1 < m; ++j1) {
          const double lv = lrow[j1];
          if (lv == 0.0) continue;
          // Output j2 uses kernel index j2 - j1 + zero; indices outside the window are lost.
          for (std::size_t k = 0; k < km; ++k) {
            const double v = trow[k] * lv * dth;
            if (v == 0.0) continue;
            const auto j2 = static_cast<long long>(k) + static_cast<long long>(j1) -
                            static_cast<long long>(zero);
            if (j2 >= 0 && j2 < static_cast<long long>(m)) {
              orow[static_cast<std::size_t>(j2)] += v;
            } else {
              lost += std::abs(v);
            }
          }
        }
      } else {
        for (std::size_t k = 0; k < km; ++k) {
          const double tv = trow[k];
          if (tv == 0.0) continue;
          for (std::size_t j1 = 0; j1 < m; ++j1) {
            const double v = tv * lrow[j1] * dth;
            if (v == 0.0) continue;
            const auto j2 = static_cast<long long>(k) + static_cast<long long>(j1) -
                            static_cast<long long>(zero);
            if (j2 >= 0 && j2 < static_cast<long long>(m)) {
              orow[static_cast<std::size_t>(j2)] += v;
            } else {
              lost += std::abs(v);
            }
          }
        }
      }
      continue;
    }

    // Full linear convolution c[q] = sum_j1 L[j1] T[q - j1]; output j2 sits at q = j2 + zero.
    auto a = fa.buffer();
    auto b = fb.buffer();
    std::fill(a.begin(), a.end(), Complex{});
    std::fill(b.begin(), b.end(), Complex{});
    for (std::size_t j = 0; j < m; ++j) a[j] = lrow[j];
    for (std::size_t k = 0; k < km; ++k) b[k] = trow[k];
    fa.execute();
    fb.execute();
    auto c = inv.buffer();
    for (std::size_t q = 0; q < p; ++q) c[q] = a[q] * b[q];
    inv.execute();
    const double scale = dth / static_cast<double>(p);
    for (std::size_t q = 0; q < 3 * m - 2; ++q) {
      const double v = c[q].real() * scale;
      if (q >= zero && q < zero + m) {
        orow[q - zero] = v;
      } else {
        lost += std::abs(v);
      }
    }
  }
  res.angular_loss = lost * g.dx() * dth;
  return res;
}

AugmentedLightField apply_shield_field(const AugmentedLightField& in, const Array2D& shield) {
  const auto& r = in.radiance();
  if (shield.rows() != r.rows() || shield.cols() != r.cols()) {
    throw InvalidConfiguration("shield: attenuation map shape does not match the light field");
  }
  AugmentedLightField out(in.grid());
  for (std::size_t q = 0; q < r.size(); ++q) {
    const double s = shield.data()[q];
    if (!(s >= 0.0 && s <= 1.0)) throw InvalidConfiguration("shield: values must lie in [0, 1]");
    out.radiance().data()[q] = s * r.data()[q];
  }
  return out;
}

GeneralKernel::GeneralKernel(PhaseSpaceGrid grid, std::size_t budget_bytes)
    : grid_(std::move(grid)), m_(grid_.theta_samples()) {
  const double need = static_cast<double>(grid_.x_samples()) * static_cast<double>(m_) *
                      static_cast<double>(m_) * sizeof(double);
  if (need > static_cast<double>(budget_bytes)) {
    std::ostringstream os;
    os << "general transformer: kernel needs " << need << " bytes, budget is " << budget_bytes;
    throw InvalidConfiguration(os.str());
  }
  data_.assign(grid_.x_samples() * m_ * m_, 0.0);
}

GeneralKernel embed(const LightFieldTransformer& t, std::size_t budget_bytes) {
  const auto& g = t.grid();
  GeneralKernel k(g, budget_bytes);
  const std::size_t m = g.theta_samples();
  for (std::size_t ix = 0; ix < g.x_samples(); ++ix) {
    for (std::size_t j2 = 0; j2 < m; ++j2) {
      for (std::size_t j1 = 0; j1 < m; ++j1) k(ix, j2, j1) = t.kernel()(ix, j2 + t.zero_index() - j1);
    }
  }
  return k;
}

GeneralKernel angle_reversal_kernel(const PhaseSpaceGrid& g, std::size_t budget_bytes) {
  GeneralKernel k(g, budget_bytes);
  const std::size_t m = g.theta_samples();
  // theta[m - j] == -theta[j]; theta[0] = -extent/2 has no partner on the half-open axis.
  for (std::size_t ix = 0; ix < g.x_samples(); ++ix) {
    for (std::size_t j1 = 1; j1 < m; ++j1) k(ix, m - j1, j1) = 1.0 / g.dtheta();
  }
  return k;
}

AugmentedLightField apply_general_transformer(const AugmentedLightField& in, const GeneralKernel& t) {
  require_same_grid(in.grid(), t.grid(), "apply_general_transformer");
  const auto& g = in.grid();
  const std::size_t m = g.theta_samples();
  const double dth = g.dtheta();
  AugmentedLightField out(g);
  for (std::size_t ix = 0; ix < g.x_samples(); ++ix) {
    const auto lrow = in.radiance().row(ix);
    for (std::size_t j2 = 0; j2 < m; ++j2) {
      double s = 0.0;
      for (std::size_t j1 = 0; j1 < m; ++j1) s += t(ix, j2, j1) * lrow[j1];
      out(ix, j2) = s * dth;
    }
  }
  return out;
}

}  // namespace alf::transformers
