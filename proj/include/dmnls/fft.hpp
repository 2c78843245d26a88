#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <fftw3.h>

namespace dmnls {

using cplx = std::complex<double>;

/// In-place 1-d complex FFT of fixed length backed by FFTW.
///
/// Plans are created with FFTW_ESTIMATE so that the algorithm choice, and
/// therefore every rounding decision, is identical from one process to the
/// next. Execution goes through the new-array interface and is safe to call
/// concurrently on distinct buffers.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);
  ~FftPlan();

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return n_; }

  /// Unnormalized sum over j of a_j exp(-2 pi i jk/n).
  void negative_exponent(std::span<cplx> data) const;
  /// Unnormalized sum over j of a_j exp(+2 pi i jk/n).
  void positive_exponent(std::span<cplx> data) const;

 private:
  std::size_t n_;
  fftw_plan neg_ = nullptr;
  fftw_plan pos_ = nullptr;
};

}  // namespace dmnls
