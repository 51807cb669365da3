#include "fft.hpp"

#include <cmath>
#include <utility>

namespace alf::detail {

FftPlan::FftPlan(std::size_t n, int sign) : n_(n) {
  buf_ = fftw_alloc_complex(n);
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, sign, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() {
  if (plan_) fftw_destroy_plan(plan_);
  if (buf_) fftw_free(buf_);
}

FftPlan::FftPlan(FftPlan&& other) noexcept
    : n_(other.n_), buf_(std::exchange(other.buf_, nullptr)),
      plan_(std::exchange(other.plan_, nullptr)) {}

void FftPlan::execute() { fftw_execute(plan_); }

std::size_t fast_fft_size(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

void dft_inplace(std::vector<Complex>& data, int sign) {
  FftPlan plan(data.size(), sign);
  auto buf = plan.buffer();
  std::copy(data.begin(), data.end(), buf.begin());
  plan.execute();
  std::copy(buf.begin(), buf.end(), data.begin());
}

std::vector<Complex> upsample(std::span<const Complex> in, std::size_t factor) {
  const std::size_t n = in.size();
  if (factor == 1) return {in.begin(), in.end()};
  std::vector<Complex> spec(in.begin(), in.end());
  dft_inplace(spec, FFTW_FORWARD);

  const std::size_t m = n * factor;
  std::vector<Complex> big(m, Complex{});
  const std::size_t half = n / 2;
  if (n % 2 == 0) {
    for (std::size_t k = 0; k < half; ++k) big[k] = spec[k];
    for (std::size_t k = half + 1; k < n; ++k) big[m - n + k] = spec[k];
    big[half] = 0.5 * spec[half];
    big[m - half] = 0.5 * spec[half];
  } else {
    for (std::size_t k = 0; k <= half; ++k) big[k] = spec[k];
    for (std::size_t k = half + 1; k < n; ++k) big[m - n + k] = spec[k];
  }
  dft_inplace(big, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& v : big) v *= scale;
  return big;
}

namespace {

// exp(-i * phase) with the phase reduced before evaluation to limit round-off for
// the large quadratic arguments used by the chirp factors.
Complex expi_neg(double phase) {
  const double r = std::remainder(phase, 2.0 * kPi);
  return {std::cos(r), -std::sin(r)};
}

}  // namespace

ChirpZ::ChirpZ(std::size_t length, std::size_t outputs, double alpha, double beta)
    : length_(length),
      outputs_(outputs),
      pre_(length),
      post_(outputs),
      fwd_(fast_fft_size(length + outputs - 1), FFTW_FORWARD),
      inv_(fwd_.size(), FFTW_BACKWARD) {
  for (std::size_t n = 0; n < length; ++n) {
    const double nd = static_cast<double>(n);
    pre_[n] = expi_neg(alpha * nd + 0.5 * beta * nd * nd);
  }
  for (std::size_t j = 0; j < outputs; ++j) {
    const double jd = static_cast<double>(j);
    post_[j] = expi_neg(0.5 * beta * jd * jd);
  }
  // Circular layout: index q holds m = q for q < J, m = q - P for the negative lags.
  const std::size_t p = fwd_.size();
  auto buf = fwd_.buffer();
  std::fill(buf.begin(), buf.end(), Complex{});
  for (std::size_t q = 0; q < outputs; ++q) {
    const double m = static_cast<double>(q);
    buf[q] = std::conj(expi_neg(0.5 * beta * m * m));
  }
  for (std::size_t k = 1; k < length; ++k) {
    const double m = static_cast<double>(k);
    buf[p - k] = std::conj(expi_neg(0.5 * beta * m * m));
  }
  fwd_.execute();
  chirp_ft_.assign(buf.begin(), buf.end());
}

void ChirpZ::apply(std::span<const Complex> in, std::span<Complex> out) {
  const std::size_t p = fwd_.size();
  auto a = fwd_.buffer();
  std::fill(a.begin(), a.end(), Complex{});
  const std::size_t n_in = std::min(in.size(), length_);
  for (std::size_t n = 0; n < n_in; ++n) a[n] = in[n] * pre_[n];
  fwd_.execute();
  auto b = inv_.buffer();
  for (std::size_t q = 0; q < p; ++q) b[q] = a[q] * chirp_ft_[q];
  inv_.execute();
  const double scale = 1.0 / static_cast<double>(p);
  for (std::size_t j = 0; j < outputs_; ++j) out[j] = b[j] * post_[j] * scale;
}

}  // namespace alf::detail
