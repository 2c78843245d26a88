#include "dmnls/phase.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dmnls {

ThetaKernel::ThetaKernel(TauQuadrature q, double d_av, double c)
    : q_(std::move(q)), d_av_(d_av), c_(c) {}

double ThetaKernel::operator()(double s) const { return c_ * theta_kernel(q_, d_av_, s); }

void accumulate_theta(PhaseAccumulator& acc, const std::array<std::span<const cplx>, 4>& stages,
                      double t, double dt, const ThetaKernel& kernel) {
  if (!(dt > 0.0)) throw std::invalid_argument("accumulate_theta: dt must be positive");
  if (std::abs(t - acc.last_update_time) > 1e-9 * std::max(1.0, std::abs(t)))
    throw std::logic_error("accumulate_theta: step starts at t=" + std::to_string(t) +
                           " but the accumulator is at t=" + std::to_string(acc.last_update_time));
  for (const auto& s : stages)
    if (s.size() != acc.theta.size()) throw std::invalid_argument("accumulate_theta: length mismatch");
  const double k0 = kernel(t), km = kernel(t + 0.5 * dt), k1 = kernel(t + dt);
  const double w0 = dt / 6.0 * k0, wm = dt / 3.0 * km, w1 = dt / 6.0 * k1;
  for (std::size_t i = 0; i < acc.theta.size(); ++i) {
    acc.theta[i] += w0 * std::norm(stages[0][i]) + wm * std::norm(stages[1][i]) +
                    wm * std::norm(stages[2][i]) + w1 * std::norm(stages[3][i]);
  }
  acc.last_update_time = t + dt;
}

std::vector<cplx> renormalized_profile(std::span<const cplx> f_hat, std::span<const double> theta) {
  if (f_hat.size() != theta.size()) throw std::invalid_argument("renormalized_profile: length mismatch");
  std::vector<cplx> g(f_hat.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::polar(1.0, theta[i]) * f_hat[i];
  return g;
}

}  // namespace dmnls
