#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace dmnls {

/// Two-piece dispersion map d(t) = d_plus on [0, t_plus), -d_minus on (t_plus, 1],
/// its average d_av, and nonlinearity coefficient c.
///
/// D(tau) is the antiderivative of the mean-zero part d0 = d - d_av; it is
/// piecewise linear with D(0) = D(1) = 0.
struct DispersionProfile {
  double d_plus = 3.0;
  double d_minus = 1.0;
  double t_plus = 0.5;
  double d_av = 1.0;
  double c = 1.0;

  /// Builds a profile with d_av derived from the three map parameters.
  static DispersionProfile from_map(double d_plus, double d_minus, double t_plus, double c = 1.0);
  /// d(t) = d_av everywhere, so d0 = 0 and D = 0.
  static DispersionProfile constant(double d_av, double c = 1.0);

  /// Throws std::invalid_argument unless the invariants hold.
  void validate() const;

  double slope_up() const { return d_plus - d_av; }
  double slope_down() const { return d_minus + d_av; }
  double peak() const { return slope_up() * t_plus; }
  bool is_tent() const;
};

double D_of_tau(const DispersionProfile& p, double tau);

struct TauNode {
  double tau;
  double weight;
  double D;
};

/// Composite Gauss-Legendre rule for the tau-average over [0, 1], with
/// `order` nodes on each linear piece of D. Weights sum to one.
struct TauQuadrature {
  std::vector<TauNode> nodes;
  int order = 0;

  double min_D() const;
  double weight_sum() const;
};

/// order >= 1; order 1 places one midpoint node on each piece.
TauQuadrature build_quadrature(const DispersionProfile& p, int order);

/// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

/// int_0^1 1/(2(d_av s + D(tau))) dtau evaluated with `q`. Throws if any
/// denominator is nonpositive.
double theta_kernel(const TauQuadrature& q, double d_av, double s);

/// Closed form of the same integral for a tent profile.
double theta_kernel_exact(const DispersionProfile& p, double s);

/// Change-of-variables evaluation of int_0^1 g(D(tau)) dtau for a tent profile:
/// (1/D_max) int_0^{D_max} g(a) da, the inner integral by composite Simpson
/// with `panels` panels. Independent of build_quadrature; used as a test oracle.
template <class T>
T tent_reduction_oracle(const DispersionProfile& p, const std::function<T(double)>& g,
                        int panels = 400) {
  if (!p.is_tent()) throw std::invalid_argument("tent_reduction_oracle: profile is not tent-shaped");
  if (panels < 2 || panels % 2 != 0) throw std::invalid_argument("tent_reduction_oracle: panels must be even");
  const double dmax = p.peak();
  const double h = dmax / panels;
  T acc = g(0.0) + g(dmax);
  for (int k = 1; k < panels; ++k) acc = acc + g(k * h) * ((k % 2 == 1) ? 4.0 : 2.0);
  return acc * (h / 3.0 / dmax);
}

}  // namespace dmnls
