#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dmnls/grid.hpp"
#include "dmnls/integrator.hpp"
#include "dmnls/phase.hpp"

namespace dmnls {

/// (t, y) samples.
using Series = std::vector<std::pair<double, double>>;

/// Samples with t_min <= t <= t_max (inclusive, with a relative slack of 1e-12).
Series window(const Series& s, double t_min, double t_max);

struct PowerFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
  double t_min = 0.0;
  double t_max = 0.0;
};

/// Least squares of log y against log t: y ~ prefactor * t^exponent.
/// Throws std::domain_error for y <= 0 and std::invalid_argument for fewer
/// than 5 points or a t-range narrower than min_span_ratio.
PowerFit fit_power_law(const Series& s, double min_span_ratio = 4.0);

/// Grid and equation constants needed to interpret stored profiles.
struct ScatteringContext {
  GridPtr grid;
  double d_av = 1.0;
  double c = 1.0;

  /// Coefficient of |W|^2 log t in Theta: c / (2 d_av).
  double kappa() const { return c / (2.0 * d_av); }
};

using Trajectory = std::vector<Snapshot>;

/// (t, ||g(2t) - g(t)||_inf) for every snapshot pair with t >= t_min.
Series dyadic_differences(const Trajectory& traj, double t_min = 1.0);

/// (sqrt(t_k t_{k+1}), ||g(t_{k+1}) - g(t_k)||_inf / (t_{k+1} - t_k)) over
/// consecutive snapshots with t >= 1. Throws if fewer than three such snapshots.
Series dtg_diagnostic(const Trajectory& traj);

/// (t, ||u(t)||_inf) for snapshots with t >= t_min.
Series linf_series(const ScatteringContext& ctx, const Trajectory& traj, double t_min = 1.0);

struct ScatteringProfiles {
  double t_final = 0.0;
  std::vector<cplx> W0;
  std::vector<double> Phi_inf;
  std::vector<cplx> W;
};

/// W0 = g(T), Phi_inf = Theta(T) - kappa |W0|^2 log T, W = e^{-i Phi_inf} W0.
ScatteringProfiles scattering_profiles(const ScatteringContext& ctx, const Snapshot& s);

struct ScatteringResult {
  ScatteringProfiles profiles;
  /// ||W(T) - W(T')||_inf with T' the snapshot nearest T/2.
  double halving_change = 0.0;
  double halving_time = 0.0;
  /// C_g T'^{-1/20} / (1 - 2^{-1/20}), C_g = max_t t^{1/20} ||g(2t) - g(t)||_inf.
  double envelope = 0.0;
  bool stable = true;

  std::optional<PowerFit> decay;
  std::optional<PowerFit> residual;
  std::optional<PowerFit> g_rate;
  std::optional<PowerFit> dtg;
  /// Reasons for any fit that could not be made.
  std::vector<std::string> fit_errors;

  double lemma_constant = 0.0;
  double theta_kernel_constant = 0.0;
};

/// Profiles at T_final plus the T_final-halving stability check. Requires a
/// snapshot at T_final and T_final >= 50 unless `allow_short`.
ScatteringResult extract_scattering_data(const ScatteringContext& ctx, const Trajectory& traj, double t_final,
                                         bool allow_short = false);

struct AsymptoticField {
  Field field;
  double coverage;
};

/// (2i d_av t)^{-1/2} e^{i x^2/(4 d_av t)} e^{-i kappa |W(xi)|^2 log t} W(xi), xi = -x/(2 d_av t),
/// with W linearly interpolated on the frequency lattice. Throws for t < 1, or
/// when coverage is below 0.99 while W is not negligible at the lattice edge.
AsymptoticField asymptotic_field(const ScatteringContext& ctx, std::span<const cplx> W, double t);

/// (t, ||u(t) - asymptotic_field(W, t)||_inf) for snapshots with t >= t_min.
Series residual_series(const ScatteringContext& ctx, const Trajectory& traj, std::span<const cplx> W,
                       double t_min = 1.0);

/// max over s in {1, 2, 4, ..., 1024} of s^2 |int_0^1 (2(d_av s + D))^{-1} dtau - (2 d_av s)^{-1}|.
double theta_kernel_constant(const TauQuadrature& q, double d_av);

struct AnalysisOptions {
  double t_min = 25.0;
  /// Window start for the dyadic g-difference fit.
  double g_t_min = 1.0;
  bool allow_short = false;
};

/// extract_scattering_data plus all rate fits over [t_min, T_final].
ScatteringResult analyze(const ScatteringContext& ctx, const Trajectory& traj, const TauQuadrature& q,
                         const AnalysisOptions& opt = {});

/// Trend test: least-squares slope of y against log t is negative.
bool decreasing_in_trend(const Series& s);

}  // namespace dmnls
