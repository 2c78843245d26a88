#include "dmnls/dispersion.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <string>

namespace dmnls {

DispersionProfile DispersionProfile::from_map(double d_plus, double d_minus, double t_plus,
                                              double c) {
  DispersionProfile p;
  p.d_plus = d_plus;
  p.d_minus = d_minus;
  p.t_plus = t_plus;
  p.d_av = d_plus * t_plus - d_minus * (1.0 - t_plus);
  p.c = c;
  return p;
}

DispersionProfile DispersionProfile::constant(double d_av, double c) {
  return from_map(d_av, -d_av, 0.5, c);
}

void DispersionProfile::validate() const {
  for (double v : {d_plus, d_minus, t_plus, d_av, c})
    if (!std::isfinite(v)) throw std::invalid_argument("dispersion: non-finite parameter");
  if (!(t_plus > 0.0 && t_plus < 1.0))
    throw std::invalid_argument("dispersion: t_plus must lie in (0,1)");
  const double implied = d_plus * t_plus - d_minus * (1.0 - t_plus);
  if (std::abs(implied - d_av) > 1e-12 * std::max(1.0, std::abs(implied)))
    throw std::invalid_argument("dispersion: d_av=" + std::to_string(d_av) +
                                " inconsistent with d_plus*t_plus - d_minus*(1-t_plus)=" +
                                std::to_string(implied));
  if (d_av == 0.0) throw std::invalid_argument("dispersion: d_av must be nonzero");
}

bool DispersionProfile::is_tent() const { return slope_up() > 0.0 && slope_down() > 0.0; }

double D_of_tau(const DispersionProfile& p, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw std::domain_error("D_of_tau: tau must lie in [0,1]");
  if (tau <= p.t_plus) return p.slope_up() * tau;
  return p.peak() - p.slope_down() * (tau - p.t_plus);
}

namespace {

// Returns P_order(x) and stores P_{order-1}(x) in prev.
double legendre(int order, double x, double& prev) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= order; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  prev = p0;
  return p1;
}

}  // namespace

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  nodes.assign(static_cast<std::size_t>(order), 0.0);
  weights.assign(static_cast<std::size_t>(order), 0.0);
  if (order == 1) {
    weights[0] = 2.0;
    return;
  }
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double prev = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      const double p = legendre(order, x, prev);
      dp = order * (x * p - prev) / (x * x - 1.0);
      const double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double p = legendre(order, x, prev);
    dp = order * (x * p - prev) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    nodes[lo] = -x;
    nodes[hi] = x;
    weights[lo] = w;
    weights[hi] = w;
  }
  if (order % 2 == 1) nodes[static_cast<std::size_t>(order / 2)] = 0.0;
}

TauQuadrature build_quadrature(const DispersionProfile& p, int order) {
  p.validate();
  if (order < 1) throw std::invalid_argument("build_quadrature: order must be >= 1");
  TauQuadrature q;
  q.order = order;
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  const double pieces[2][2] = {{0.0, p.t_plus}, {p.t_plus, 1.0}};
  for (const auto& piece : pieces) {
    const double a = piece[0], b = piece[1];
    const double half = 0.5 * (b - a);
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double tau = a + half * (x[k] + 1.0);
      q.nodes.push_back({tau, half * w[k], D_of_tau(p, tau)});
    }
  }
  const double total = q.weight_sum();
  for (auto& n : q.nodes) n.weight /= total;
  return q;
}

double TauQuadrature::min_D() const {
  double m = INFINITY;
  for (const auto& n : nodes) m = std::min(m, n.D);
  return m;
}

double TauQuadrature::weight_sum() const {
  double s = 0.0;
  for (const auto& n : nodes) s += n.weight;
  return s;
}

double theta_kernel(const TauQuadrature& q, double d_av, double s) {
  double acc = 0.0;
  for (const auto& n : q.nodes) {
    const double den = d_av * s + n.D;
    if (!(den > 0.0))
      throw std::domain_error("theta_kernel: nonpositive denominator d_av*s + D = " +
                              std::to_string(den));
    acc += n.weight / (2.0 * den);
  }
  return acc;
}

double theta_kernel_exact(const DispersionProfile& p, double s) {
  if (!p.is_tent()) throw std::invalid_argument("theta_kernel_exact: profile is not tent-shaped");
  const double a = p.d_av * s;
  if (!(a > 0.0)) throw std::domain_error("theta_kernel_exact: d_av*s must be positive");
  // Both branches sweep D over [0, peak]; the slopes combine to 1/peak.
  return std::log1p(p.peak() / a) / (2.0 * p.peak());
}

}  // namespace dmnls
