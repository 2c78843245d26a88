#include "dmnls/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dmnls/nonlinearity.hpp"

namespace dmnls {

namespace {
constexpr double kCoverageRequired = 0.99;
constexpr double kEdgeNegligible = 1e-10;
}  // namespace

void apply_free_multiplier(const Grid& grid, std::span<cplx> f_hat, double t) {
  if (!std::isfinite(t)) throw std::domain_error("free_evolve: non-finite time");
  if (t == 0.0) return;
  const auto xi = grid.xi();
  for (std::size_t i = 0; i < f_hat.size(); ++i) f_hat[i] *= std::polar(1.0, -t * xi[i] * xi[i]);
}

Field free_evolve(const Field& f, double t) {
  if (f.space() != Space::position)
    throw std::invalid_argument("free_evolve: expected a position-space field");
  if (!std::isfinite(t)) throw std::domain_error("free_evolve: non-finite time");
  const Grid& g = f.grid();
  std::vector<cplx> buf(f.size());
  g.to_frequency(f.values(), buf);
  apply_free_multiplier(g, buf, t);
  g.to_position(buf, buf);
  return Field(f.grid_ptr(), std::move(buf), Space::position);
}

bool interpolate_on_lattice(const Grid& grid, std::span<const cplx> values, double xi, cplx& out) {
  const double n = static_cast<double>(grid.n());
  const double p = xi / grid.dxi() + 0.5 * n;
  if (!(p >= 0.0 && p <= n - 1.0)) {
    out = 0.0;
    return false;
  }
  auto i0 = static_cast<std::size_t>(std::floor(p));
  if (i0 >= grid.n() - 1) i0 = grid.n() - 2;
  const double w = p - static_cast<double>(i0);
  out = (1.0 - w) * values[i0] + w * values[i0 + 1];
  return true;
}

double edge_fraction(std::span<const cplx> values) {
  const double peak = sup_norm(values);
  if (peak == 0.0) return 0.0;
  const std::size_t band = std::max<std::size_t>(1, values.size() / 20);
  double edge = 0.0;
  for (std::size_t i = 0; i < band; ++i) {
    edge = std::max(edge, std::abs(values[i]));
    edge = std::max(edge, std::abs(values[values.size() - 1 - i]));
  }
  return edge / peak;
}

FactorizedResult factorized_evolve(const Field& f, double t, const FactorizedOptions& opt) {
  if (f.space() != Space::position)
    throw std::invalid_argument("factorized_evolve: expected a position-space field");
  if (!(t >= opt.t_min))
    throw std::domain_error("factorized_evolve: t=" + std::to_string(t) + " below t_min=" +
                            std::to_string(opt.t_min));
  const Grid& g = f.grid();
  const auto x = g.x();
  std::vector<cplx> buf(f.size());
  for (std::size_t j = 0; j < buf.size(); ++j)
    buf[j] = std::polar(1.0, x[j] * x[j] / (4.0 * t)) * f[j];
  g.to_frequency(buf, buf);
  const std::vector<cplx> transformed = buf;

  const cplx prefactor = 1.0 / std::sqrt(cplx(0.0, 2.0 * t));
  std::size_t covered = 0;
  for (std::size_t j = 0; j < buf.size(); ++j) {
    cplx v;
    if (interpolate_on_lattice(g, transformed, -x[j] / (2.0 * t), v)) ++covered;
    buf[j] = prefactor * std::polar(1.0, x[j] * x[j] / (4.0 * t)) * v;
  }
  const double coverage = static_cast<double>(covered) / static_cast<double>(buf.size());
  if (coverage < kCoverageRequired && edge_fraction(transformed) > kEdgeNegligible)
    throw std::domain_error("factorized_evolve: dilation covers only " + std::to_string(coverage) +
                            " of the grid and the transform is not negligible at the lattice edge");
  return {Field(f.grid_ptr(), std::move(buf), Space::position), coverage};
}

Field galilean_J(const Field& u, double t) {
  if (u.space() != Space::position)
    throw std::invalid_argument("galilean_J: expected a position-space field");
  const Field du = spectral_derivative(u);
  const auto x = u.grid().x();
  std::vector<cplx> out(u.size());
  const cplx two_it{0.0, 2.0 * t};
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = x[j] * u[j] + two_it * du[j];
  return Field(u.grid_ptr(), std::move(out), Space::position);
}

double chain_rule_residual(const Field& z, double t) {
  const Field lhs = galilean_J(cubic(z, true), t);
  const Field jz = galilean_J(z, t);
  std::vector<cplx> diff(z.size());
  for (std::size_t j = 0; j < diff.size(); ++j) {
    const cplx rhs = 2.0 * std::norm(z[j]) * jz[j] - z[j] * z[j] * std::conj(jz[j]);
    diff[j] = lhs[j] - rhs;
  }
  return l2_norm(z.grid(), diff, Space::position);
}

}  // namespace dmnls
