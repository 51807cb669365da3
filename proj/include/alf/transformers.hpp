#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "alf/core.hpp"
#include "alf/elements.hpp"
#include "alf/wdf.hpp"

namespace alf::transformers {

/// Kernel T(x, dtheta) of a thin, angle-shift-invariant element.
///
/// Rows are x samples; columns are relative angles dtheta_k = (k - (M-1)) * dtheta
/// for k < 2M-1, where M is the grid's theta_samples. dtheta is the deflection
/// output angle minus input angle.
class LightFieldTransformer {
 public:
  LightFieldTransformer(PhaseSpaceGrid grid, Array2D kernel, std::string tag);

  const PhaseSpaceGrid& grid() const { return grid_; }
  const Array2D& kernel() const { return kernel_; }
  Array2D& kernel() { return kernel_; }
  const std::string& tag() const { return tag_; }

  std::size_t relative_samples() const { return kernel_.cols(); }
  std::size_t zero_index() const { return grid_.theta_samples() - 1; }
  double relative_angle(std::size_t k) const {
    return (static_cast<double>(k) - static_cast<double>(zero_index())) * grid_.dtheta();
  }

  /// Clipped diffraction orders and similar diagnostics from construction.
  const Warnings& warnings() const { return warnings_; }
  Warnings& warnings() { return warnings_; }

 private:
  PhaseSpaceGrid grid_;
  Array2D kernel_;
  std::string tag_;
  Warnings warnings_;
};

/// How kernel rows sample the Wigner distribution along x.
enum class RowSampling {
  /// Value at each node.
  point,
  /// Trapezoid average over the cell [x - dx/2, x + dx/2]. A distribution of a
  /// field with content up to Nyquist oscillates in x at up to 1/dx, so node
  /// samples alias; spike transmittances need this to match delta kernels.
  cell_average,
};

/// Kernel from the Wigner distribution of a sampled transmittance. Virtual
/// sources appear automatically as the interference terms of the distribution.
LightFieldTransformer transformer_from_transmittance(const ComplexField& t,
                                                     const wdf::WdfOptions& opts = {},
                                                     RowSampling rows = RowSampling::point);

/// Closed-form kernels for the catalogued elements. Phase elements follow the
/// slowly-varying-phase rule T = delta(dtheta - (lambda / 2 pi) dphi/dx). Angular
/// deltas land on the nearest relative-angle bin with weight 1/dtheta; x deltas on
/// the nearest node with weight 1/dx. Deltas beyond the relative-angle range are
/// dropped and listed in warnings(). CodedAperture delegates to
/// transformer_from_transmittance.
LightFieldTransformer canonical_transformer(const ElementSpec& element, const PhaseSpaceGrid& grid);

/// Kernel S(x) delta(dtheta) of a pure attenuator.
LightFieldTransformer shield_transformer(std::span<const double> attenuation,
                                         const PhaseSpaceGrid& grid);

struct TransformResult {
  AugmentedLightField field;
  /// Sum of |radiance| dx dtheta that left the theta window (zero-padded boundary).
  double angular_loss = 0.0;
};

/// L_out(x, theta2) = sum_theta1 T(x, theta2 - theta1) L_in(x, theta1) dtheta:
/// multiplication along x, convolution along theta.
TransformResult apply_transformer(const AugmentedLightField& in, const LightFieldTransformer& t);

/// L_out = S * L_in pointwise; S must lie in [0, 1].
AugmentedLightField apply_shield_field(const AugmentedLightField& in, const Array2D& shield);

/// Dense kernel T(x, theta2, theta1) for thin elements without angle-shift invariance.
class GeneralKernel {
 public:
  static constexpr std::size_t kDefaultBudgetBytes = std::size_t{512} << 20;

  /// Zero kernel; throws InvalidConfiguration if it would exceed budget_bytes.
  GeneralKernel(PhaseSpaceGrid grid, std::size_t budget_bytes = kDefaultBudgetBytes);

  const PhaseSpaceGrid& grid() const { return grid_; }
  double& operator()(std::size_t ix, std::size_t out_theta, std::size_t in_theta) {
    return data_[(ix * m_ + out_theta) * m_ + in_theta];
  }
  double operator()(std::size_t ix, std::size_t out_theta, std::size_t in_theta) const {
    return data_[(ix * m_ + out_theta) * m_ + in_theta];
  }
  std::size_t bytes() const { return data_.size() * sizeof(double); }

 private:
  PhaseSpaceGrid grid_;
  std::size_t m_;
  std::vector<double> data_;
};

/// T3(x, theta2, theta1) = T(x, theta2 - theta1).
GeneralKernel embed(const LightFieldTransformer& t,
                    std::size_t budget_bytes = GeneralKernel::kDefaultBudgetBytes);

/// delta(theta2 + theta1) at every x: mirrors the light field in angle.
GeneralKernel angle_reversal_kernel(const PhaseSpaceGrid& grid,
                                    std::size_t budget_bytes = GeneralKernel::kDefaultBudgetBytes);

/// L_out(x, theta2) = sum_theta1 T3(x, theta2, theta1) L_in(x, theta1) dtheta.
AugmentedLightField apply_general_transformer(const AugmentedLightField& in, const GeneralKernel& t);

}  // namespace alf::transformers
