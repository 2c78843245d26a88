#include "dmnls/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmnls/text_io.hpp"

namespace dmnls {

namespace {

bool is_power_of_two(std::size_t n) { return n >= 8 && (n & (n - 1)) == 0; }

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  for (double t : v)
    if (out.empty() || t - out.back() > 1e-12 * std::max(1.0, t)) out.push_back(t);
  v = std::move(out);
}

const SimConfig& validated(const SimConfig& cfg) {
  cfg.validate();
  return cfg;
}

double profile_mass(const Grid& g, std::span<const cplx> f_hat) {
  const double l2 = l2_norm(g, f_hat, Space::frequency);
  return l2 * l2;
}

double profile_h1(const Grid& g, std::span<const cplx> f_hat) {
  const auto xi = g.xi();
  double s = 0.0;
  for (std::size_t i = 0; i < f_hat.size(); ++i) s += (1.0 + xi[i] * xi[i]) * std::norm(f_hat[i]);
  return std::sqrt(s * g.dxi());
}

std::size_t step_count(double span, double dt) {
  const double m = std::ceil(span / dt * (1.0 - 1e-12));
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

/// 0, optionally 1, and the given times, without duplicates.
std::vector<double> breakpoints(const std::vector<double>& times, double t_end) {
  std::vector<double> b = times;
  b.push_back(0.0);
  b.push_back(t_end);
  if (t_end > 1.0) b.push_back(1.0);
  sort_unique(b);
  return b;
}

}  // namespace

std::string to_string(InitialShape s) { return s == InitialShape::gaussian ? "gaussian" : "file"; }

InitialShape parse_initial_shape(const std::string& s) {
  if (s == "gaussian") return InitialShape::gaussian;
  if (s == "file" || s == "custom-file") return InitialShape::file;
  throw std::invalid_argument("initial.shape: expected gaussian or file, got '" + s + "'");
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::non_finite: return "non_finite";
    case RunStatus::boundary_breach: return "boundary_breach";
    case RunStatus::h1_blowup: return "h1_blowup";
  }
  return "unknown";
}

double default_length(double t_end) { return std::max(64.0, 32.0 * t_end); }

std::vector<double> default_snapshot_times(double t_end) {
  std::vector<double> t{0.0, t_end};
  for (int k = -8;; ++k) {
    const double v = std::exp2(k / 4.0);
    if (v > t_end * (1.0 + 1e-12)) break;
    t.push_back(v);
  }
  if (t_end >= 2.0) t.push_back(0.5 * t_end);
  sort_unique(t);
  return t;
}

void SimConfig::validate() const {
  auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
  if (!(epsilon >= 0.0 && std::isfinite(epsilon))) fail("initial.epsilon must be finite and >= 0");
  if (!is_power_of_two(n)) fail("grid.n must be a power of two >= 8 (got " + std::to_string(n) + ")");
  if (!(length >= 0.0 && std::isfinite(length))) fail("grid.L must be positive (or 0 for the default)");
  profile.validate();
  if (!(profile.d_av > 0.0)) fail("dispersion.d_av must be positive");
  if (!std::isfinite(profile.c)) fail("dispersion.c must be finite");
  if (quad_order < 1) fail("dispersion.quad_order must be >= 1");
  if (!(dt > 0.0 && std::isfinite(dt))) fail("time.dt must be positive");
  if (!(t_end >= 0.0 && std::isfinite(t_end))) fail("time.t_end must be finite and >= 0");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) fail("time.snapshots must be sorted");
  for (double t : snapshot_times)
    if (!(t >= 0.0 && t <= t_end)) fail("time.snapshots must lie in [0, t_end]");
  if (shape == InitialShape::file && initial_file.empty()) fail("initial.file is required for shape=file");
  if (t_end > 1.0 && profile.d_av + build_quadrature(profile, quad_order).min_D() <= 0.0)
    fail("dispersion: d_av + min D must be positive for the phase integral on [1, t_end]");
}

double SimConfig::domain_length() const { return length > 0.0 ? length : default_length(t_end); }

std::vector<double> SimConfig::snapshots() const {
  if (snapshot_times.empty()) return default_snapshot_times(t_end);
  std::vector<double> t = snapshot_times;
  t.push_back(0.0);
  t.push_back(t_end);
  sort_unique(t);
  return t;
}

double gaussian_amplitude(const GridPtr& grid, double epsilon) {
  // the norm is homogeneous of degree one, so the root of ||a e^{-x^2}|| = eps is explicit
  const Field unit = Field::from_position_function(grid, [](double x) { return cplx(std::exp(-x * x)); });
  return epsilon / norm(unit, NormKind::H11);
}

Simulator::Simulator(SimConfig cfg)
    : cfg_(validated(cfg)),
      grid_(Grid::make(cfg_.n, cfg_.domain_length())),
      quad_(build_quadrature(cfg_.profile, cfg_.quad_order)),
      op_(grid_, quad_, cfg_.profile.c, {cfg_.dealias, cfg_.threads}),
      kernel_(quad_, cfg_.profile.d_av, cfg_.profile.c) {
  const std::size_t n = grid_->n();
  u_hat_.resize(n);
  nl_.resize(n);
  phase_.resize(n);
  for (auto& k : k_) k.resize(n);
  for (auto& y : y_) y.resize(n);
}

SimState Simulator::prepare_initial() const {
  SimState s;
  s.theta = PhaseAccumulator(grid_->n());
  s.f_hat.assign(grid_->n(), cplx{});
  if (cfg_.epsilon == 0.0) return s;
  std::vector<cplx> u0;
  if (cfg_.shape == InitialShape::gaussian) {
    const double a = gaussian_amplitude(grid_, cfg_.epsilon);
    const auto x = grid_->x();
    u0.resize(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) u0[j] = a * std::exp(-x[j] * x[j]);
  } else {
    if (!std::filesystem::exists(cfg_.initial_file))
      throw std::invalid_argument("initial.file not found: " + cfg_.initial_file.string());
    const Field f = read_field_csv(cfg_.initial_file, grid_);
    if (f.space() != Space::position)
      throw std::invalid_argument("initial.file must hold a position-space field");
    const double nrm = norm(f, NormKind::H11);
    if (nrm == 0.0) throw std::invalid_argument("initial.file holds the zero field");
    u0.assign(f.values().begin(), f.values().end());
    for (auto& v : u0) v *= cfg_.epsilon / nrm;
  }
  grid_->to_frequency(u0, s.f_hat);
  return s;
}

void Simulator::rhs(std::span<const cplx> f_hat, double t, std::span<cplx> out) {
  const auto xi = grid_->xi();
  const double s = cfg_.profile.d_av * t;
  for (std::size_t i = 0; i < xi.size(); ++i) {
    phase_[i] = std::polar(1.0, -s * xi[i] * xi[i]);
    u_hat_[i] = f_hat[i] * phase_[i];
  }
  op_.apply(u_hat_, nl_);
  for (std::size_t i = 0; i < xi.size(); ++i) out[i] = cplx(0.0, -1.0) * std::conj(phase_[i]) * nl_[i];
}

Field Simulator::rhs(const Field& f_hat, double t) {
  if (f_hat.space() != Space::frequency) throw std::invalid_argument("rhs: expected a frequency-space field");
  std::vector<cplx> out(f_hat.size());
  rhs(f_hat.values(), t, out);
  return Field(f_hat.grid_ptr(), std::move(out), Space::frequency);
}

void Simulator::step_rk4(SimState& s, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("step_rk4: dt must be positive");
  const double t = s.t;
  auto& f = s.f_hat;
  const std::size_t n = f.size();
  rhs(f, t, k_[0]);
  for (std::size_t i = 0; i < n; ++i) y_[0][i] = f[i] + 0.5 * h * k_[0][i];
  rhs(y_[0], t + 0.5 * h, k_[1]);
  for (std::size_t i = 0; i < n; ++i) y_[1][i] = f[i] + 0.5 * h * k_[1][i];
  rhs(y_[1], t + 0.5 * h, k_[2]);
  for (std::size_t i = 0; i < n; ++i) y_[2][i] = f[i] + h * k_[2][i];
  rhs(y_[2], t + h, k_[3]);
  if (t >= 1.0) accumulate_theta(s.theta, {f, y_[0], y_[1], y_[2]}, t, h, kernel_);
  const double w = h / 6.0;
  for (std::size_t i = 0; i < n; ++i)
    f[i] += w * (k_[0][i] + 2.0 * k_[1][i] + 2.0 * k_[2][i] + k_[3][i]);
  s.t = t + h;
  ++s.step_count;
  s.recent.push_back({s.t, profile_mass(*grid_, f), profile_h1(*grid_, f)});
  if (s.recent.size() > SimState::kRingSize) s.recent.pop_front();
}

ObservablesRecord Simulator::observe(const SimState& s) {
  return compute_observables({grid_, s.t, s.f_hat, cfg_.profile.d_av}, op_);
}

Snapshot Simulator::snapshot(const SimState& s) { return {s.t, s.f_hat, s.theta.theta, observe(s)}; }

RunResult Simulator::run(const RunOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  RunResult res;
  SimState s = prepare_initial();
  const auto snaps = cfg_.snapshots();
  const auto bps = breakpoints(snaps, cfg_.t_end);
  auto is_snapshot = [&](double t) {
    return std::any_of(snaps.begin(), snaps.end(),
                       [&](double v) { return std::abs(v - t) <= 1e-12 * std::max(1.0, t); });
  };
  auto& st = res.stats;
  const Grid& g = *grid_;

  auto emit = [&]() {
    Snapshot snap = snapshot(s);
    const auto& o = snap.obs;
    if (res.trajectory.empty()) {
      st.energy0 = o.energy;
    } else {
      const auto& prev = res.trajectory.back().theta;
      for (std::size_t i = 0; i < prev.size(); ++i)
        if (snap.theta[i] < prev[i]) st.theta_monotone = false;
    }
    if (st.energy0 != 0.0)
      st.max_energy_drift = std::max(st.max_energy_drift, std::abs(o.energy - st.energy0) / std::abs(st.energy0));
    st.max_boundary_fraction = std::max(st.max_boundary_fraction, o.boundary_mass_fraction);
    st.max_j_gap = std::max(st.max_j_gap, o.j_identity_gap());
    if (opt.on_snapshot) opt.on_snapshot(snap);
    res.trajectory.push_back(std::move(snap));
  };

  st.mass0 = profile_mass(g, s.f_hat);
  emit();
  const double h1_limit = opt.h1_blowup_factor * cfg_.epsilon;
  auto abort_with = [&](RunStatus status, const std::string& msg, const SimState& good) {
    res.status = status;
    res.message = msg;
    res.last_good = Snapshot{good.t, good.f_hat, good.theta.theta, {}};
    res.last_good->obs.t = good.t;
  };

  for (std::size_t b = 0; b + 1 < bps.size(); ++b) {
    const double b0 = bps[b], b1 = bps[b + 1];
    const std::size_t m = step_count(b1 - b0, cfg_.dt);
    const double h = (b1 - b0) / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      SimState before = s;
      s.t = b0 + static_cast<double>(j) * h;
      step_rk4(s, h);
      if (j + 1 == m) s.t = b1;
      ++st.steps;
      if (!all_finite(s.f_hat)) {
        abort_with(RunStatus::non_finite, "non-finite profile after step " + std::to_string(s.step_count) +
                                              " at t=" + format_double(s.t), before);
        break;
      }
      const double mass = s.recent.back().mass;
      if (st.mass0 > 0.0) st.max_mass_drift = std::max(st.max_mass_drift, std::abs(mass - st.mass0) / st.mass0);
      if (cfg_.epsilon > 0.0 && s.recent.back().h1 > h1_limit) {
        abort_with(RunStatus::h1_blowup, "||u||_H1=" + format_double(s.recent.back().h1) + " exceeds " +
                                             format_double(h1_limit) + " at t=" + format_double(s.t), s);
        break;
      }
      if (opt.boundary_check_every > 0 && s.step_count % opt.boundary_check_every == 0) {
        const auto u = reconstruct_u({grid_, s.t, s.f_hat, cfg_.profile.d_av});
        const double frac = boundary_mass_fraction(g, u);
        st.max_boundary_fraction = std::max(st.max_boundary_fraction, frac);
        if (frac > opt.boundary_tolerance) {
          abort_with(RunStatus::boundary_breach, "boundary mass fraction " + format_double(frac) + " at t=" +
                                                     format_double(s.t), s);
          break;
        }
      }
    }
    if (res.status != RunStatus::completed) break;
    if (is_snapshot(b1)) {
      emit();
      if (res.trajectory.back().obs.boundary_mass_fraction > opt.boundary_tolerance) {
        abort_with(RunStatus::boundary_breach,
                   "boundary mass fraction " + format_double(res.trajectory.back().obs.boundary_mass_fraction) +
                       " at t=" + format_double(s.t), s);
        break;
      }
    }
  }
  st.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

namespace {

std::vector<cplx> integrate_profile(Simulator& sim, double t_end, double dt) {
  SimState s = sim.prepare_initial();
  const auto bps = breakpoints({}, t_end);
  for (std::size_t b = 0; b + 1 < bps.size(); ++b) {
    const double b0 = bps[b], b1 = bps[b + 1];
    const std::size_t m = step_count(b1 - b0, dt);
    const double h = (b1 - b0) / static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
      s.t = b0 + static_cast<double>(j) * h;
      sim.step_rk4(s, h);
    }
  }
  return s.f_hat;
}

}  // namespace

std::vector<cplx> integrate_to(const SimConfig& cfg, double dt) {
  Simulator sim(cfg);
  return integrate_profile(sim, cfg.t_end, dt);
}

OrderTest observed_order(const std::function<std::vector<cplx>(double)>& integrate, const Grid& grid,
                         double dt, double threshold) {
  OrderTest r;
  r.dt = dt;
  r.n = grid.n();
  r.length = grid.length();
  const auto y1 = integrate(dt), y2 = integrate(dt / 2), y3 = integrate(dt / 4);
  std::vector<cplx> d12(y1.size()), d23(y1.size());
  for (std::size_t i = 0; i < y1.size(); ++i) {
    d12[i] = y1[i] - y2[i];
    d23[i] = y2[i] - y3[i];
  }
  const double scale = l2_norm(grid, y3, Space::frequency);
  if (scale == 0.0) {
    r.roundoff_limited = true;
    r.passed = true;
    return r;
  }
  r.err_coarse = l2_norm(grid, d12, Space::frequency) / scale;
  r.err_fine = l2_norm(grid, d23, Space::frequency) / scale;
  r.order = r.err_fine > 0.0 ? std::log2(r.err_coarse / r.err_fine) : INFINITY;
  r.roundoff_limited = r.err_coarse < 1e-13;
  r.passed = r.roundoff_limited || r.order >= threshold;
  return r;
}

SimConfig self_test_config(const SimConfig& cfg) {
  SimConfig c = cfg;
  c.t_end = std::min(cfg.t_end, 2.0);
  c.snapshot_times.clear();
  if (cfg.shape == InitialShape::gaussian) {
    const double dx = cfg.domain_length() / static_cast<double>(cfg.n);
    c.n = std::min<std::size_t>(cfg.n, 512);
    c.length = dx * static_cast<double>(c.n);
  } else {
    c.length = cfg.domain_length();
  }
  return c;
}

OrderTest rk4_self_test(const SimConfig& cfg) {
  const SimConfig c = self_test_config(cfg);
  if (c.t_end == 0.0) {
    OrderTest r;
    r.dt = cfg.dt;
    r.roundoff_limited = true;
    r.passed = true;
    return r;
  }
  Simulator sim(c);
  auto r = observed_order([&](double dt) { return integrate_profile(sim, c.t_end, dt); }, *sim.grid(), cfg.dt, 3.5);
  r.horizon = c.t_end;
  return r;
}

}  // namespace dmnls
