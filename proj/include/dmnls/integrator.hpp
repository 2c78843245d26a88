#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dmnls/dispersion.hpp"
#include "dmnls/grid.hpp"
#include "dmnls/nonlinearity.hpp"
#include "dmnls/observables.hpp"
#include "dmnls/phase.hpp"

namespace dmnls {

enum class InitialShape { gaussian, file };

std::string to_string(InitialShape s);
InitialShape parse_initial_shape(const std::string& s);

struct SimConfig {
  double epsilon = 0.1;
  InitialShape shape = InitialShape::gaussian;
  std::filesystem::path initial_file;
  std::size_t n = 4096;
  /// Domain length; 0 selects default_length(t_end).
  double length = 0.0;
  bool dealias = true;
  DispersionProfile profile;
  int quad_order = 16;
  double dt = 0.05;
  double t_end = 10.0;
  /// Empty selects default_snapshot_times(t_end).
  std::vector<double> snapshot_times;
  unsigned threads = 1;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  double domain_length() const;
  std::vector<double> snapshots() const;
};

/// 32 t_end, at least 64: the spectrum of unit-width data reaches |xi| ~ 6 and
/// travels to |x| = 2 |xi| t.
double default_length(double t_end);

/// t = 0, then 2^{k/4} for k >= -8 up to t_end, plus t_end/2 (if >= 1) and t_end.
std::vector<double> default_snapshot_times(double t_end);

struct StepDiagnostic {
  double t;
  double mass;
  double h1;
};

struct SimState {
  double t = 0.0;
  std::vector<cplx> f_hat;
  PhaseAccumulator theta;
  std::size_t step_count = 0;
  /// The most recent step diagnostics, oldest first.
  std::deque<StepDiagnostic> recent;

  static constexpr std::size_t kRingSize = 64;
};

struct Snapshot {
  double t;
  std::vector<cplx> f_hat;
  std::vector<double> theta;
  ObservablesRecord obs;
};

enum class RunStatus { completed, non_finite, boundary_breach, h1_blowup };

std::string to_string(RunStatus s);

struct RunStats {
  std::size_t steps = 0;
  double wall_seconds = 0.0;
  double mass0 = 0.0;
  double max_mass_drift = 0.0;    ///< relative, over every step
  double energy0 = 0.0;
  double max_energy_drift = 0.0;  ///< relative, over snapshots
  double max_boundary_fraction = 0.0;
  double max_j_gap = 0.0;
  bool theta_monotone = true;
};

struct RunResult {
  std::vector<Snapshot> trajectory;
  RunStatus status = RunStatus::completed;
  std::string message;
  RunStats stats;
  /// Last finite state when the run aborted.
  std::optional<Snapshot> last_good;
};

struct RunOptions {
  /// Steps between boundary-mass checks (snapshots are always checked).
  std::size_t boundary_check_every = 10;
  double mass_tolerance = 1e-8;
  double energy_tolerance = 1e-6;
  double boundary_tolerance = 1e-6;
  /// Abort when ||u||_{H^1} exceeds this multiple of epsilon.
  double h1_blowup_factor = 1e3;
  std::function<void(const Snapshot&)> on_snapshot;
};

/// Interaction-picture RK4 integrator for
///   i u_t + d_av u_xx = c int_0^1 e^{-iD Delta}(|e^{iD Delta}u|^2 e^{iD Delta}u) dtau
/// acting on the profile f^ = F[e^{-i d_av t Delta} u].
class Simulator {
 public:
  explicit Simulator(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  const GridPtr& grid() const { return grid_; }
  const TauQuadrature& quadrature() const { return quad_; }
  AveragedNonlinearity& nonlinearity() { return op_; }

  /// u0 = a e^{-x^2} with ||u0||_{H^{1,1}} = epsilon, or the file field
  /// rescaled to the same norm. Theta = 0, t = 0.
  SimState prepare_initial() const;

  /// d f^/dt = -i e^{i d_av t xi^2} F[N[u]], u^ = e^{-i d_av t xi^2} f^.
  void rhs(std::span<const cplx> f_hat, double t, std::span<cplx> out);
  Field rhs(const Field& f_hat, double t);

  /// One classical RK4 step; Theta is advanced from the same stages once t >= 1.
  void step_rk4(SimState& s, double dt);

  ObservablesRecord observe(const SimState& s);
  Snapshot snapshot(const SimState& s);

  /// Steps from 0 to t_end, landing exactly on t = 1 and every snapshot time.
  RunResult run(const RunOptions& opt = {});

 private:
  SimConfig cfg_;
  GridPtr grid_;
  TauQuadrature quad_;
  AveragedNonlinearity op_;
  ThetaKernel kernel_;
  std::vector<cplx> u_hat_, nl_, phase_;
  std::vector<cplx> k_[4], y_[3];
};

/// Amplitude a such that ||a e^{-x^2}||_{H^{1,1}} = epsilon on `grid`.
double gaussian_amplitude(const GridPtr& grid, double epsilon);

/// Fixed-step integration of a config from 0 to t_end (no snapshots, no
/// checks), returning f^(t_end). Used by the self-convergence tests.
std::vector<cplx> integrate_to(const SimConfig& cfg, double dt);

struct OrderTest {
  double dt = 0.0;
  double horizon = 0.0;
  std::size_t n = 0;
  double length = 0.0;
  double err_coarse = 0.0;  ///< ||y(dt) - y(dt/2)|| / ||y||
  double err_fine = 0.0;    ///< ||y(dt/2) - y(dt/4)|| / ||y||
  double order = 0.0;
  bool roundoff_limited = false;
  bool passed = false;
};

/// Observed order from dt, dt/2, dt/4. `integrate(dt)` returns the final profile.
OrderTest observed_order(const std::function<std::vector<cplx>(double)>& integrate, const Grid& grid,
                         double dt, double threshold);

/// Reduced copy used by the pre-run tests: same dx, at most 512 points
/// (Gaussian data only), horizon min(t_end, 2), no snapshots.
SimConfig self_test_config(const SimConfig& cfg);

/// Pre-run dt-halving test on a reduced copy of the config: same dx, at most
/// 512 points, horizon min(t_end, 2). Passes at observed order >= 3.5, or
/// when the differences are already at roundoff.
OrderTest rk4_self_test(const SimConfig& cfg);

}  // namespace dmnls
