#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "alf/core.hpp"
#include "alf/elements.hpp"

namespace alf::scenarios {

/// Point emitter at x0 whose angular spectrum is flat up to |theta| <= half_angle
/// with a raised-cosine roll-off over the outer `taper` fraction.
struct PointSource {
  double x0 = 0.0;
  double half_angle = 0.0;
  double taper = 0.2;
};

/// Unit-amplitude plane wave at angle theta0 (snapped to the nearest theta bin).
struct PlaneWave {
  double theta0 = 0.0;
};

struct FieldSource {
  ComplexField field;
};

using Source = std::variant<PointSource, PlaneWave, FieldSource>;

struct Propagate {
  double z = 0.0;
};

struct ElementStage {
  ElementSpec element;
};

using Stage = std::variant<Propagate, ElementStage>;

enum class Observation { intensity, full_phase_space };

/// Which kernels the light-field pipeline uses for element stages: the
/// closed-form catalogue (phase elements as ray deflections) or the sampled
/// Wigner distribution of each element's transmittance.
enum class KernelMode { canonical, transmittance };

struct OracleOptions {
  bool enabled = true;
  /// The wave-optics oracle runs on a grid this many times wider (same dx) so
  /// that light leaving the window does not wrap around.
  std::size_t pad_factor = 8;
};

struct OpticalTrain {
  PhaseSpaceGrid grid;
  Source source;
  std::vector<Stage> stages;
  Observation observation = Observation::intensity;
  OracleOptions oracle;
  KernelMode kernels = KernelMode::canonical;
  /// Stage aborts when its truncation fraction exceeds this.
  double abort_fraction = 0.9;
};

/// Throws InvalidConfiguration unless the train has stages, all z >= 0 and valid elements.
void validate_train(const OpticalTrain& train);

struct ComparisonReport {
  IntensityProfile alf_intensity;
  /// Same grid as alf_intensity; empty values when the oracle was disabled.
  IntensityProfile oracle_intensity;
  bool oracle_run = false;
  /// ||I_alf - I_oracle|| / ||I_oracle||.
  double relative_l2_error = 0.0;
  /// argmax(I_alf) - argmax(I_oracle), in grid cells.
  long long peak_position_offset = 0;
  /// Combined share of the light field lost at window boundaries over all stages.
  double truncation_loss = 0.0;
  Warnings warnings;
};

struct TrainResult {
  AugmentedLightField field;
  ComparisonReport report;
  /// Light field after the source and after every stage (full_phase_space only).
  std::vector<AugmentedLightField> snapshots;
};

/// A stage pushed more than the allowed share of the light field out of the window.
class ScenarioAborted : public std::runtime_error {
 public:
  ScenarioAborted(std::size_t stage, double fraction);
  std::size_t stage() const { return stage_; }
  double fraction() const { return fraction_; }

 private:
  std::size_t stage_;
  double fraction_;
};

/// Source field on the given grid (the oracle's starting point).
ComplexField source_field(const Source& source, const PhaseSpaceGrid& grid);

/// Source light field on the train grid.
AugmentedLightField source_light_field(const Source& source, const PhaseSpaceGrid& grid);

/// Runs the stages through the light-field pipeline (shear + canonical
/// transformers) and, unless disabled, through the Fresnel oracle, then compares
/// the final intensities. Elements act only inside the x window in both pipelines.
TrainResult run_train(const OpticalTrain& train);

struct CubicSweepConfig {
  PhaseSpaceGrid grid;
  double focal_length = 0.0;
  double aperture = 0.0;
  double alpha = 0.0;
  /// Fixed image distance behind the lens; the in-focus object distance follows
  /// from 1/s + 1/s' = 1/f.
  double image_distance = 0.0;
  /// Object-distance perturbations added to the in-focus distance.
  std::vector<double> defocus;
  /// Angular half-width of the point source.
  double source_half_angle = 0.0;
  OracleOptions oracle;
  KernelMode kernels = KernelMode::canonical;
};

struct CubicSweepResult {
  std::vector<IntensityProfile> alf_psfs;
  std::vector<IntensityProfile> oracle_psfs;
  Array2D alf_similarity;
  Array2D oracle_similarity;
  std::vector<double> alf_skewness;
  std::vector<double> oracle_skewness;
};

/// PSF sweep over defocus for the train {point source, propagate s, lens + cubic
/// mask + aperture, propagate s'}.
CubicSweepResult cubic_phase_psf_sweep(const CubicSweepConfig& config);

/// Pearson correlation of two profiles after shifting b so its centroid matches a's.
double aligned_correlation(std::span<const double> a, std::span<const double> b);

/// Centroid, in cells, of a non-negative profile.
double centroid(std::span<const double> profile);

/// Third standardized moment of a profile treated as a distribution over its index.
double skewness(std::span<const double> profile);

/// Recorded in-line hologram of a point at distance d: E_r* E_o + E_r E_o* at z = 0
/// for a unit plane reference and a paraxial spherical object wave.
Hologram hologram_record(double distance);

}  // namespace alf::scenarios
