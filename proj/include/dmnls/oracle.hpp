#pragma once

#include <vector>

#include "dmnls/grid.hpp"
#include "dmnls/integrator.hpp"

namespace dmnls {

/// One Strang step for i u_t + d_av u_xx = c |u|^2 u: half free step, exact
/// pointwise phase rotation u e^{-i c |u|^2 dt}, half free step.
Field strang_step(const Field& u, double dt, double c, double d_av = 1.0);

/// Independent split-step solver of the constant-dispersion cubic equation.
/// Requires a profile with D = 0 (e.g. DispersionProfile::constant); emits the
/// same snapshot schedule and records as Simulator::run, with Theta left at 0.
RunResult run_oracle(const SimConfig& cfg, const RunOptions& opt = {});

/// Profile f^(t_end) after fixed-step Strang integration (breakpoint at t = 1 only).
std::vector<cplx> oracle_integrate_to(const SimConfig& cfg, double dt);

/// dt-halving order of the oracle over [0, t_end]; passes at order >= 1.8.
OrderTest oracle_order(const SimConfig& cfg);

/// oracle_order on self_test_config(cfg).
OrderTest strang_self_test(const SimConfig& cfg);

}  // namespace dmnls
