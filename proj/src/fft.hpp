#pragma once

// Thin RAII layer over FFTW3 shared by the wdf, propagation and fresnel modules.

#include <fftw3.h>

#include <cstddef>
#include <span>
#include <vector>

#include "alf/core.hpp"

namespace alf::detail {

/// Unnormalized in-place complex DFT of fixed length. Plans use FFTW_ESTIMATE so
/// that results are reproducible run to run.
class FftPlan {
 public:
  FftPlan(std::size_t n, int sign);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& other) noexcept;
  FftPlan& operator=(FftPlan&&) = delete;

  std::size_t size() const { return n_; }
  std::span<Complex> buffer() { return {reinterpret_cast<Complex*>(buf_), n_}; }
  void execute();

 private:
  std::size_t n_;
  fftw_complex* buf_;
  fftw_plan plan_;
};

/// Smallest n' >= n whose only prime factors are 2, 3, 5, 7.
std::size_t fast_fft_size(std::size_t n);

/// In-place forward (sign = -1) or inverse (sign = +1, unnormalized) DFT.
void dft_inplace(std::vector<Complex>& data, int sign);

/// Band-limited (trigonometric) interpolation by an integer factor: output sample
/// factor*i equals input sample i. For even lengths the Nyquist bin is split
/// evenly between positive and negative frequencies.
std::vector<Complex> upsample(std::span<const Complex> in, std::size_t factor);

/// Evaluates X_j = sum_{n<L} x_n exp(-i (alpha n + beta j n)), j < J, with
/// Bluestein's algorithm. Constructed once per (L, J, alpha, beta).
class ChirpZ {
 public:
  ChirpZ(std::size_t length, std::size_t outputs, double alpha, double beta);

  std::size_t length() const { return length_; }
  std::size_t outputs() const { return outputs_; }

  /// `in` may be shorter than length() (zero padded); `out` must hold outputs().
  void apply(std::span<const Complex> in, std::span<Complex> out);

 private:
  std::size_t length_;
  std::size_t outputs_;
  std::vector<Complex> pre_;       // exp(-i(alpha n + beta n^2/2))
  std::vector<Complex> post_;      // exp(-i beta j^2 / 2)
  std::vector<Complex> chirp_ft_;  // FFT of exp(+i beta m^2 / 2), m in [-(L-1), J-1]
  FftPlan fwd_;
  FftPlan inv_;
};

}  // namespace alf::detail
