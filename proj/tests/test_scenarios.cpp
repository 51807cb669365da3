#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "alf/fresnel.hpp"
#include "alf/scenarios.hpp"
#include "oracles.hpp"

using namespace alf;
using namespace alf::scenarios;

namespace {

const double kLambda = 633e-9;

OpticalTrain young_train(double a, double b, double z) {
  const auto g = PhaseSpaceGrid::make(1024, 4e-3, 2048, 0.06, kLambda);
  return OpticalTrain{g, PlaneWave{0.0}, {ElementStage{TwoPinholes{a, b}}, Propagate{z}},
                      Observation::intensity, {}, KernelMode::canonical};
}

// Fringe period from the dominant spatial frequency of the central part of a
// profile: the maximum of the Hann-windowed Fourier power, refined by
// golden-section search.
double fringe_period(const std::vector<double>& v, const PhaseSpaceGrid& g, double half_span) {
  std::vector<double> x;
  std::vector<double> s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(g.x(i)) > half_span) continue;
    x.push_back(g.x(i));
    s.push_back(v[i]);
  }
  double mean = 0.0;
  for (double q : s) mean += q / static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = (s[i] - mean) * std::pow(std::cos(0.5 * kPi * x[i] / half_span), 2);
  auto power = [&](double nu) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      re += s[i] * std::cos(2 * kPi * nu * x[i]);
      im -= s[i] * std::sin(2 * kPi * nu * x[i]);
    }
    return re * re + im * im;
  };
  const double lo = 1.0 / half_span;
  const double hi = 0.1 / g.dx();
  const double step = 0.125 / half_span;
  double best = lo;
  for (double nu = lo; nu <= hi; nu += step)
    if (power(nu) > power(best)) best = nu;
  double a = best - step;
  double b = best + step;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double c = b - r * (b - a);
    const double d = a + r * (b - a);
    if (power(c) > power(d)) b = d; else a = c;
  }
  return 2.0 / (a + b);
}

}  // namespace

TEST_CASE("train validation") {
  const auto g = PhaseSpaceGrid::make(64, 1e-3, 64, 0.02, kLambda);
  OpticalTrain t{g, PlaneWave{0.0}, {}, Observation::intensity, {}, KernelMode::canonical};
  CHECK_THROWS_AS(validate_train(t), InvalidConfiguration);
  t.stages = {Propagate{-0.1}};
  CHECK_THROWS_AS(validate_train(t), InvalidConfiguration);
  t.stages = {Propagate{0.1}};
  CHECK_NOTHROW(validate_train(t));
  t.source = PointSource{0.0, 0.5};
  CHECK_THROWS_AS(validate_train(t), InvalidConfiguration);
  t.source = PointSource{1.0, 0.005};
  CHECK_THROWS_AS(validate_train(t), InvalidConfiguration);
  t.source = PlaneWave{0.0};
  t.stages = {ElementStage{RectAperture{-1.0}}};
  CHECK_THROWS_AS(run_train(t), InvalidConfiguration);
}

TEST_CASE("sources") {
  const auto g = PhaseSpaceGrid::make(256, 1e-3, 128, 0.02, kLambda);
  const auto pw = source_field(PlaneWave{0.004}, g);
  const double u = g.u(g.nearest_theta(0.004));
  for (std::size_t i : {0u, 100u}) CHECK(std::abs(pw[i] - std::polar(1.0, 2 * kPi * u * g.x(i))) < 1e-12);
  const auto lf = source_light_field(PlaneWave{0.004}, g);
  CHECK(project_intensity(lf).values[7] == doctest::Approx(1.0));

  const double x0 = g.x(170);
  const auto p = source_field(PointSource{x0, 0.008, 0.2}, g).intensity();
  CHECK(std::max_element(p.begin(), p.end()) - p.begin() == 170);
  const auto plf = source_light_field(PointSource{x0, 0.008, 0.2}, g);
  const auto pi = project_intensity(plf).values;
  CHECK(std::max_element(pi.begin(), pi.end()) - pi.begin() == 170);
}

TEST_CASE("Young train: both pipelines agree and show the fringe law") {
  const double dx = 4e-3 / 1024.0;
  const double a = 12 * dx;
  const double b = -12 * dx;
  const double z = 0.1;
  const auto r = run_train(young_train(a, b, z));
  const auto& rep = r.report;
  REQUIRE(rep.oracle_run);
  CHECK(rep.relative_l2_error < 0.02);
  const auto& g = rep.alf_intensity.grid;
  const double expected = kLambda * z / (a - b);
  CHECK(std::abs(fringe_period(rep.alf_intensity.values, g, 1.5e-3) - expected) < g.dx());
  CHECK(std::abs(fringe_period(rep.oracle_intensity.values, g, 1.5e-3) - expected) < g.dx());
  double peak = 0.0;
  for (double v : rep.alf_intensity.values) peak = std::max(peak, v);
  CHECK(within_projection_bound(rep.alf_intensity, 1e-3 * peak));
}

TEST_CASE("single-lens train images a point to -x0 s'/s") {
  const auto g = PhaseSpaceGrid::make(1024, 4e-3, 1024, 0.04, kLambda);
  const double x0 = 0.2e-3;
  OpticalTrain t{g,
                 PointSource{x0, 0.015},
                 {Propagate{0.1}, ElementStage{Lens{0.05}}, ElementStage{RectAperture{1e-3}}, Propagate{0.1}},
                 Observation::full_phase_space,
                 {},
                 KernelMode::canonical};
  const auto r = run_train(t);
  CHECK(r.snapshots.size() == 5);
  const auto& v = r.report.alf_intensity.values;
  CHECK(std::max_element(v.begin(), v.end()) - v.begin() == static_cast<long>(g.nearest_x(-x0)));
  CHECK(r.report.peak_position_offset == 0);
  CHECK(r.report.relative_l2_error < 0.02);
  CHECK(r.report.truncation_loss > 0.0);
  CHECK(r.report.truncation_loss < 0.5);
}

TEST_CASE("oracle can be switched off") {
  auto t = young_train(50e-6, -50e-6, 0.05);
  t.oracle.enabled = false;
  const auto r = run_train(t);
  CHECK_FALSE(r.report.oracle_run);
  CHECK(r.report.oracle_intensity.values.empty());
  CHECK(r.snapshots.empty());
}

TEST_CASE("stages that push the light out of the window abort the run") {
  const auto g = PhaseSpaceGrid::make(128, 1e-3, 64, 0.02, kLambda);
  OpticalTrain t{g, PlaneWave{0.008}, {ElementStage{Prism{0.0}}, Propagate{0.5}},
                 Observation::intensity, {false, 8}, KernelMode::canonical};
  try {
    run_train(t);
    FAIL("expected an abort");
  } catch (const ScenarioAborted& e) {
    CHECK(e.stage() == 1);
    CHECK(e.fraction() > 0.9);
  }
}

TEST_CASE("transmittance kernels match the oracle for the hologram train") {
  const auto g = PhaseSpaceGrid::make(512, 2e-3, 512, 0.04, kLambda);
  OpticalTrain t{g, PlaneWave{0.0}, {ElementStage{hologram_record(0.1)}, Propagate{0.1}},
                 Observation::intensity, {}, KernelMode::transmittance};
  const auto r = run_train(t);
  CHECK(r.report.relative_l2_error < 0.02);
  CHECK(r.report.peak_position_offset == 0);
}

TEST_CASE("recorded hologram") {
  const auto h = hologram_record(0.1);
  CHECK(h.distance == 0.1);
  CHECK(h.cross_term == CrossTerm::published);
  CHECK_THROWS_AS(hologram_record(0.0), InvalidConfiguration);
  const auto g = PhaseSpaceGrid::make(64, 1e-3, 8, 0.01, kLambda);
  const auto t = transmittance(h, g);
  CHECK(t[32].real() == doctest::Approx(2 * std::cos(2 * kPi * 0.1 / kLambda)).epsilon(1e-6));
}

TEST_CASE("profile statistics") {
  std::vector<double> p(64, 0.0);
  for (std::size_t i = 10; i < 40; ++i) p[i] = std::exp(-0.15 * static_cast<double>(i - 10));
  std::vector<double> mirrored(p.rbegin(), p.rend());
  CHECK(skewness(p) > 0.5);
  CHECK(skewness(mirrored) == doctest::Approx(-skewness(p)));
  CHECK(centroid(mirrored) == doctest::Approx(63.0 - centroid(p)));
  std::vector<double> shifted(64, 0.0);
  for (std::size_t i = 0; i + 7 < 64; ++i) shifted[i + 7] = p[i];
  CHECK(aligned_correlation(p, shifted) == doctest::Approx(1.0));
  CHECK(aligned_correlation(p, mirrored) < 0.9);
  CHECK_THROWS_AS(centroid(std::vector<double>(4, 0.0)), DegenerateInput);
  CHECK_THROWS_AS(aligned_correlation(p, std::vector<double>(3, 1.0)), InvalidConfiguration);
}

TEST_CASE("cubic sweep returns one PSF per defocus and a symmetric similarity matrix") {
  const auto g = PhaseSpaceGrid::make(512, 4e-3, 512, 0.06, kLambda);
  CubicSweepConfig c{g, 0.05, 2e-3, 3e10, 0.1, {-0.01, 0.0, 0.01}, 0.02, {false, 8}, KernelMode::canonical};
  const auto r = cubic_phase_psf_sweep(c);
  REQUIRE(r.alf_psfs.size() == 3);
  CHECK(r.oracle_psfs.empty());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.alf_similarity(i, i) == doctest::Approx(1.0));
    for (std::size_t j = 0; j < 3; ++j) CHECK(r.alf_similarity(i, j) == doctest::Approx(r.alf_similarity(j, i)).epsilon(1e-2));
  }
  c.alpha = 1e13;
  CHECK_THROWS_AS(cubic_phase_psf_sweep(c), InvalidConfiguration);
  c.alpha = 0.0;
  c.defocus.clear();
  CHECK_THROWS_AS(cubic_phase_psf_sweep(c), InvalidConfiguration);
}
