#include "dmnls/fft.hpp"

#include <mutex>
#include <stdexcept>
#include <vector>

namespace dmnls {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("FftPlan: zero length");
  std::vector<cplx> scratch(n);
  const auto flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  neg_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(scratch.data()), as_fftw(scratch.data()),
                          FFTW_FORWARD, flags);
  pos_ = fftw_plan_dft_1d(static_cast<int>(n), as_fftw(scratch.data()), as_fftw(scratch.data()),
                          FFTW_BACKWARD, flags);
  if (!neg_ || !pos_) throw std::runtime_error("FftPlan: FFTW planning failed");
}

FftPlan::~FftPlan() {
  std::lock_guard lock(planner_mutex());
  if (neg_) fftw_destroy_plan(neg_);
  if (pos_) fftw_destroy_plan(pos_);
}

void FftPlan::negative_exponent(std::span<cplx> data) const {
  if (data.size() != n_) throw std::invalid_argument("FftPlan: length mismatch");
  fftw_execute_dft(neg_, as_fftw(data.data()), as_fftw(data.data()));
}

void FftPlan::positive_exponent(std::span<cplx> data) const {
  if (data.size() != n_) throw std::invalid_argument("FftPlan: length mismatch");
  fftw_execute_dft(pos_, as_fftw(data.data()), as_fftw(data.data()));
}

}  // namespace dmnls
