#pragma once

#include <array>
#include <span>
#include <vector>

#include "dmnls/dispersion.hpp"
#include "dmnls/fft.hpp"

namespace dmnls {

/// K(s) = c * int_0^1 (2(d_av s + D(tau)))^{-1} dtau, evaluated with a TauQuadrature.
class ThetaKernel {
 public:
  ThetaKernel(TauQuadrature q, double d_av, double c);
  double operator()(double s) const;
  double d_av() const { return d_av_; }
  double c() const { return c_; }

 private:
  TauQuadrature q_;
  double d_av_;
  double c_;
};

/// Theta(t, xi) = int_1^t K(s) |f^(s, xi)|^2 ds on the frequency lattice.
struct PhaseAccumulator {
  std::vector<double> theta;
  double last_update_time = 1.0;

  PhaseAccumulator() = default;
  explicit PhaseAccumulator(std::size_t n) : theta(n, 0.0) {}
};

/// Advances Theta over [t, t+dt] from the four RK4 stage profiles, taken at
/// t, t+dt/2, t+dt/2, t+dt, with weights dt/6 * {1, 2, 2, 1}. This is Simpson's
/// rule in s with the midpoint value averaged over the two middle stages.
///
/// Throws std::logic_error if t does not continue from last_update_time, and
/// std::domain_error if the kernel denominator is not positive.
void accumulate_theta(PhaseAccumulator& acc, const std::array<std::span<const cplx>, 4>& stages,
                      double t, double dt, const ThetaKernel& kernel);

/// g = e^{i Theta} f^.
std::vector<cplx> renormalized_profile(std::span<const cplx> f_hat, std::span<const double> theta);

}  // namespace dmnls
