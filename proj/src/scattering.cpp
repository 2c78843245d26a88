#include "dmnls/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dmnls/observables.hpp"
#include "dmnls/propagator.hpp"
#include "dmnls/text_io.hpp"

namespace dmnls {

namespace {

constexpr double kCoverageRequired = 0.99;
constexpr double kEdgeNegligible = 1e-10;

bool same_time(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

const Snapshot* find_snapshot(const Trajectory& traj, double t) {
  for (const auto& s : traj)
    if (same_time(s.t, t)) return &s;
  return nullptr;
}

double sup_diff(std::span<const cplx> a, std::span<const cplx> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

Series window(const Series& s, double t_min, double t_max) {
  Series out;
  for (const auto& p : s)
    if (p.first >= t_min * (1 - 1e-12) && p.first <= t_max * (1 + 1e-12)) out.push_back(p);
  return out;
}

PowerFit fit_power_law(const Series& s, double min_span_ratio) {
  if (s.size() < 5)
    throw std::invalid_argument("fit_power_law: need at least 5 points, got " + std::to_string(s.size()));
  double tmin = INFINITY, tmax = 0.0;
  for (const auto& [t, y] : s) {
    if (!(t > 0.0)) throw std::invalid_argument("fit_power_law: t must be positive");
    if (!(y > 0.0)) throw std::domain_error("fit_power_law: y must be positive (got " + format_double(y) + " at t=" + format_double(t) + ")");
    tmin = std::min(tmin, t);
    tmax = std::max(tmax, t);
  }
  if (tmax < min_span_ratio * tmin * (1 - 1e-12))
    throw std::invalid_argument("fit_power_law: t spans [" + format_double(tmin) + ", " + format_double(tmax) +
                                "], narrower than a factor " + format_double(min_span_ratio));
  const double n = static_cast<double>(s.size());
  double sx = 0, sy = 0;
  for (const auto& [t, y] : s) {
    sx += std::log(t);
    sy += std::log(y);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [t, y] : s) {
    const double dx = std::log(t) - mx, dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  PowerFit f;
  f.exponent = sxy / sxx;
  f.prefactor = std::exp(my - f.exponent * mx);
  double ss_res = 0.0;
  for (const auto& [t, y] : s) {
    const double r = std::log(y) - (my + f.exponent * (std::log(t) - mx));
    ss_res += r * r;
  }
  f.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  f.points = s.size();
  f.t_min = tmin;
  f.t_max = tmax;
  return f;
}

Series dyadic_differences(const Trajectory& traj, double t_min) {
  Series out;
  for (const auto& s : traj) {
    if (s.t < t_min * (1 - 1e-12)) continue;
    const Snapshot* d = find_snapshot(traj, 2.0 * s.t);
    if (!d) continue;
    const auto g1 = renormalized_profile(s.f_hat, s.theta);
    const auto g2 = renormalized_profile(d->f_hat, d->theta);
    out.emplace_back(s.t, sup_diff(g2, g1));
  }
  return out;
}

Series dtg_diagnostic(const Trajectory& traj) {
  std::vector<const Snapshot*> late;
  for (const auto& s : traj)
    if (s.t >= 1.0) late.push_back(&s);
  if (late.size() < 3)
    throw std::invalid_argument("dtg_diagnostic: need at least 3 snapshots with t >= 1, got " +
                                std::to_string(late.size()));
  Series out;
  auto prev = renormalized_profile(late[0]->f_hat, late[0]->theta);
  for (std::size_t k = 1; k < late.size(); ++k) {
    auto cur = renormalized_profile(late[k]->f_hat, late[k]->theta);
    const double t0 = late[k - 1]->t, t1 = late[k]->t;
    out.emplace_back(std::sqrt(t0 * t1), sup_diff(cur, prev) / (t1 - t0));
    prev = std::move(cur);
  }
  return out;
}

Series linf_series(const ScatteringContext& ctx, const Trajectory& traj, double t_min) {
  Series out;
  for (const auto& s : traj)
    if (s.t >= t_min * (1 - 1e-12)) out.emplace_back(s.t, sup_norm(reconstruct_u({ctx.grid, s.t, s.f_hat, ctx.d_av})));
  return out;
}

ScatteringProfiles scattering_profiles(const ScatteringContext& ctx, const Snapshot& s) {
  if (!(s.t >= 1.0)) throw std::domain_error("scattering_profiles: T_final must be >= 1");
  ScatteringProfiles p;
  p.t_final = s.t;
  p.W0 = renormalized_profile(s.f_hat, s.theta);
  p.Phi_inf.resize(p.W0.size());
  p.W.resize(p.W0.size());
  const double lt = std::log(s.t);
  for (std::size_t i = 0; i < p.W0.size(); ++i) {
    p.Phi_inf[i] = s.theta[i] - ctx.kappa() * std::norm(p.W0[i]) * lt;
    p.W[i] = std::polar(1.0, -p.Phi_inf[i]) * p.W0[i];
  }
  return p;
}

ScatteringResult extract_scattering_data(const ScatteringContext& ctx, const Trajectory& traj, double t_final,
                                         bool allow_short) {
  if (!allow_short && t_final < 50.0)
    throw std::invalid_argument("extract_scattering_data: T_final must be >= 50 (got " + format_double(t_final) + ")");
  const Snapshot* last = find_snapshot(traj, t_final);
  if (!last) throw std::invalid_argument("extract_scattering_data: no snapshot at T_final=" + format_double(t_final));
  ScatteringResult r;
  r.profiles = scattering_profiles(ctx, *last);

  const Snapshot* half = nullptr;
  for (const auto& s : traj) {
    if (s.t < 1.0 || s.t >= t_final * (1 - 1e-12)) continue;
    if (!half || std::abs(std::log(s.t / (0.5 * t_final))) < std::abs(std::log(half->t / (0.5 * t_final))))
      half = &s;
  }
  if (!half) return r;
  const auto ph = scattering_profiles(ctx, *half);
  r.halving_time = half->t;
  r.halving_change = sup_diff(r.profiles.W, ph.W);
  double cg = 0.0;
  for (const auto& [t, d] : dyadic_differences(traj, 1.0))
    if (2.0 * t <= t_final * (1 + 1e-12)) cg = std::max(cg, d * std::pow(t, kRateExponent));
  r.envelope = cg * std::pow(half->t, -kRateExponent) / (1.0 - std::exp2(-kRateExponent));
  r.stable = r.halving_change <= r.envelope;
  return r;
}

AsymptoticField asymptotic_field(const ScatteringContext& ctx, std::span<const cplx> W, double t) {
  if (!(t >= 1.0)) throw std::domain_error("asymptotic_field: t must be >= 1 (got " + format_double(t) + ")");
  const Grid& g = *ctx.grid;
  if (W.size() != g.n()) throw std::invalid_argument("asymptotic_field: length mismatch");
  const double s = ctx.d_av * t;
  const cplx pref = 1.0 / std::sqrt(cplx(0.0, 2.0 * s));
  const double kl = ctx.kappa() * std::log(t);
  const auto x = g.x();
  std::vector<cplx> out(g.n());
  std::size_t covered = 0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    cplx w;
    if (interpolate_on_lattice(g, W, -x[j] / (2.0 * s), w)) ++covered;
    out[j] = pref * std::polar(1.0, x[j] * x[j] / (4.0 * s) - kl * std::norm(w)) * w;
  }
  const double coverage = static_cast<double>(covered) / static_cast<double>(out.size());
  if (coverage < kCoverageRequired && edge_fraction(W) > kEdgeNegligible)
    throw std::domain_error("asymptotic_field: coverage " + format_double(coverage) +
                            " with W not negligible at the lattice edge");
  return {Field(ctx.grid, std::move(out), Space::position), coverage};
}

Series residual_series(const ScatteringContext& ctx, const Trajectory& traj, std::span<const cplx> W,
                       double t_min) {
  Series out;
  for (const auto& s : traj) {
    if (s.t < std::max(1.0, t_min) * (1 - 1e-12)) continue;
    const auto u = reconstruct_u({ctx.grid, s.t, s.f_hat, ctx.d_av});
    const auto a = asymptotic_field(ctx, W, s.t);
    out.emplace_back(s.t, sup_diff(u, a.field.values()));
  }
  return out;
}

double theta_kernel_constant(const TauQuadrature& q, double d_av) {
  double c = 0.0;
  for (double s = 1.0; s <= 1024.0; s *= 2.0)
    c = std::max(c, s * s * std::abs(theta_kernel(q, d_av, s) - 1.0 / (2.0 * d_av * s)));
  return c;
}

ScatteringResult analyze(const ScatteringContext& ctx, const Trajectory& traj, const TauQuadrature& q,
                         const AnalysisOptions& opt) {
  if (traj.empty()) throw std::invalid_argument("analyze: empty trajectory");
  const double T = traj.back().t;
  ScatteringResult r = extract_scattering_data(ctx, traj, T, opt.allow_short);
  auto attempt = [&](const char* name, std::optional<PowerFit>& slot, auto&& make_series) {
    try {
      slot = fit_power_law(make_series());
    } catch (const std::exception& e) {
      r.fit_errors.push_back(std::string(name) + ": " + e.what());
    }
  };
  attempt("decay", r.decay, [&] { return window(linf_series(ctx, traj), opt.t_min, T); });
  attempt("residual", r.residual,
          [&] { return window(residual_series(ctx, traj, r.profiles.W, opt.t_min), opt.t_min, T); });
  attempt("g_rate", r.g_rate, [&] { return window(dyadic_differences(traj, opt.g_t_min), opt.g_t_min, 0.5 * T); });
  attempt("dtg", r.dtg, [&] { return window(dtg_diagnostic(traj), opt.t_min, T); });
  for (const auto& s : traj)
    if (s.t >= 1.0) r.lemma_constant = std::max(r.lemma_constant, lemma_ratio({ctx.grid, s.t, s.f_hat, ctx.d_av}));
  r.theta_kernel_constant = theta_kernel_constant(q, ctx.d_av);
  return r;
}

bool decreasing_in_trend(const Series& s) {
  if (s.size() < 2) return false;
  double mx = 0, my = 0;
  for (const auto& [t, y] : s) {
    mx += std::log(t);
    my += y;
  }
  mx /= static_cast<double>(s.size());
  my /= static_cast<double>(s.size());
  double sxy = 0, sxx = 0;
  for (const auto& [t, y] : s) {
    sxy += (std::log(t) - mx) * (y - my);
    sxx += (std::log(t) - mx) * (std::log(t) - mx);
  }
  return sxx > 0 && sxy < 0;
}

}  // namespace dmnls
