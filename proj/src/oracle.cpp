#include "dmnls/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "dmnls/propagator.hpp"
#include "dmnls/text_io.hpp"

namespace dmnls {

namespace {

class Stepper {
 public:
  Stepper(GridPtr g, double c, double d_av) : g_(std::move(g)), c_(c), d_av_(d_av), u_(g_->n()) {}

  /// u_hat holds the transform of u and is advanced in place.
  void step(std::vector<cplx>& u_hat, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("strang_step: dt must be positive");
    apply_free_multiplier(*g_, u_hat, 0.5 * d_av_ * h);
    g_->to_position(u_hat, u_);
    for (auto& v : u_) v *= std::polar(1.0, -c_ * std::norm(v) * h);
    g_->to_frequency(u_, u_hat);
    apply_free_multiplier(*g_, u_hat, 0.5 * d_av_ * h);
  }

 private:
  GridPtr g_;
  double c_, d_av_;
  std::vector<cplx> u_;
};

void require_flat(const SimConfig& cfg) {
  cfg.validate();
  const auto q = build_quadrature(cfg.profile, 1);
  for (const auto& n : q.nodes)
    if (n.D != 0.0) throw std::invalid_argument("oracle: requires a constant-dispersion profile (D = 0)");
}

std::vector<cplx> initial_u_hat(const SimConfig& cfg) {
  // same initial data as the main integrator; at t = 0 profile and solution coincide
  SimConfig c = cfg;
  c.t_end = 0.0;
  c.snapshot_times.clear();
  return Simulator(c).prepare_initial().f_hat;
}

std::vector<cplx> to_profile(const Grid& g, const std::vector<cplx>& u_hat, double d_av, double t) {
  std::vector<cplx> f = u_hat;
  apply_free_multiplier(g, f, -d_av * t);
  return f;
}

std::vector<double> breaks(double t_end, const std::vector<double>& snaps) {
  std::vector<double> b = snaps;
  b.push_back(0.0);
  b.push_back(t_end);
  if (t_end > 1.0) b.push_back(1.0);
  std::sort(b.begin(), b.end());
  std::vector<double> out;
  for (double t : b)
    if (out.empty() || t - out.back() > 1e-12 * std::max(1.0, t)) out.push_back(t);
  return out;
}

std::size_t steps_for(double span, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt * (1.0 - 1e-12))));
}

}  // namespace

Field strang_step(const Field& u, double dt, double c, double d_av) {
  if (u.space() != Space::position) throw std::invalid_argument("strang_step: expected a position-space field");
  if (!std::isfinite(dt) || !std::isfinite(c)) throw std::domain_error("strang_step: non-finite parameter");
  std::vector<cplx> uh(u.size());
  u.grid().to_frequency(u.values(), uh);
  Stepper(u.grid_ptr(), c, d_av).step(uh, dt);
  u.grid().to_position(uh, uh);
  return Field(u.grid_ptr(), std::move(uh), Space::position);
}

std::vector<cplx> oracle_integrate_to(const SimConfig& cfg, double dt) {
  require_flat(cfg);
  const auto g = Grid::make(cfg.n, cfg.domain_length());
  auto uh = initial_u_hat(cfg);
  Stepper st(g, cfg.profile.c, cfg.profile.d_av);
  const auto b = breaks(cfg.t_end, {});
  for (std::size_t k = 0; k + 1 < b.size(); ++k) {
    const std::size_t m = steps_for(b[k + 1] - b[k], dt);
    const double h = (b[k + 1] - b[k]) / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) st.step(uh, h);
  }
  return to_profile(*g, uh, cfg.profile.d_av, cfg.t_end);
}

OrderTest oracle_order(const SimConfig& cfg) {
  const auto g = Grid::make(cfg.n, cfg.domain_length());
  auto r = observed_order([&](double dt) { return oracle_integrate_to(cfg, dt); }, *g, cfg.dt, 1.8);
  r.horizon = cfg.t_end;
  return r;
}

OrderTest strang_self_test(const SimConfig& cfg) {
  if (cfg.t_end == 0.0) {
    OrderTest r;
    r.dt = cfg.dt;
    r.roundoff_limited = true;
    r.passed = true;
    return r;
  }
  return oracle_order(self_test_config(cfg));
}

RunResult run_oracle(const SimConfig& cfg, const RunOptions& opt) {
  require_flat(cfg);
  const auto start = std::chrono::steady_clock::now();
  // the Simulator supplies grid, initial data and observables; stepping is independent
  Simulator sim(cfg);
  const GridPtr& g = sim.grid();
  const double d_av = cfg.profile.d_av;
  RunResult res;
  auto& st = res.stats;
  auto uh = initial_u_hat(cfg);
  Stepper stepper(g, cfg.profile.c, d_av);
  const auto snaps = cfg.snapshots();
  const std::vector<double> zero_theta(g->n(), 0.0);

  auto make_state = [&](double t) {
    SimState s;
    s.t = t;
    s.f_hat = to_profile(*g, uh, d_av, t);
    s.theta.theta = zero_theta;
    return s;
  };
  auto emit = [&](double t) {
    Snapshot snap = sim.snapshot(make_state(t));
    if (res.trajectory.empty()) {
      st.energy0 = snap.obs.energy;
      st.mass0 = snap.obs.mass;
    }
    if (st.energy0 != 0.0)
      st.max_energy_drift = std::max(st.max_energy_drift, std::abs(snap.obs.energy - st.energy0) / std::abs(st.energy0));
    if (st.mass0 != 0.0)
      st.max_mass_drift = std::max(st.max_mass_drift, std::abs(snap.obs.mass - st.mass0) / st.mass0);
    st.max_boundary_fraction = std::max(st.max_boundary_fraction, snap.obs.boundary_mass_fraction);
    st.max_j_gap = std::max(st.max_j_gap, snap.obs.j_identity_gap());
    if (opt.on_snapshot) opt.on_snapshot(snap);
    res.trajectory.push_back(std::move(snap));
  };

  emit(0.0);
  const auto b = breaks(cfg.t_end, snaps);
  const double h1_limit = opt.h1_blowup_factor * cfg.epsilon;
  for (std::size_t k = 0; k + 1 < b.size() && res.status == RunStatus::completed; ++k) {
    const std::size_t m = steps_for(b[k + 1] - b[k], cfg.dt);
    const double h = (b[k + 1] - b[k]) / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      const auto before = uh;
      stepper.step(uh, h);
      ++st.steps;
      const double t = b[k] + static_cast<double>(j + 1) * h;
      if (!all_finite(uh)) {
        res.status = RunStatus::non_finite;
        res.message = "non-finite field at t=" + format_double(t);
        uh = before;
        res.last_good = Snapshot{t - h, to_profile(*g, uh, d_av, t - h), zero_theta, {}};
        break;
      }
      const auto xi = g->xi();
      double s = 0.0;
      for (std::size_t i = 0; i < uh.size(); ++i) s += (1.0 + xi[i] * xi[i]) * std::norm(uh[i]);
      if (cfg.epsilon > 0.0 && std::sqrt(s * g->dxi()) > h1_limit) {
        res.status = RunStatus::h1_blowup;
        res.message = "H1 norm exceeds " + format_double(h1_limit) + " at t=" + format_double(t);
        break;
      }
    }
    if (res.status != RunStatus::completed) break;
    const double t1 = b[k + 1];
    if (std::any_of(snaps.begin(), snaps.end(), [&](double v) { return std::abs(v - t1) <= 1e-12 * std::max(1.0, t1); })) {
      emit(t1);
      if (res.trajectory.back().obs.boundary_mass_fraction > opt.boundary_tolerance) {
        res.status = RunStatus::boundary_breach;
        res.message = "boundary mass fraction " + format_double(res.trajectory.back().obs.boundary_mass_fraction) +
                      " at t=" + format_double(t1);
      }
    }
  }
  st.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace dmnls
