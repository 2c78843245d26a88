#pragma once

#include <span>

#include "dmnls/grid.hpp"

namespace dmnls {

/// Multiplies a natural-order frequency array by e^{-i t xi^2}, i.e. applies e^{it Delta}.
void apply_free_multiplier(const Grid& grid, std::span<cplx> f_hat, double t);

/// e^{it Delta} f for any finite t.
Field free_evolve(const Field& f, double t);

struct FactorizedOptions {
  double t_min = 1e-3;
};

struct FactorizedResult {
  Field field;
  /// Fraction of x-nodes whose dilation argument -x/(2t) lies inside the frequency lattice.
  double coverage;
};

/// e^{it Delta} f evaluated through the M(t) D(t) F M(t) factorization.
///
/// The dilation reads the transform of M(t) f at xi = -x/(2t) by linear
/// interpolation on the frequency lattice. The minus sign follows from the
/// e^{+ix xi} forward kernel: a mode at frequency xi travels to x = -2 xi t.
/// Nodes whose argument falls outside the lattice receive zero. Throws if
/// t < t_min, or if coverage is incomplete while the transform is not
/// negligible at the lattice edge.
FactorizedResult factorized_evolve(const Field& f, double t, const FactorizedOptions& opt = {});

/// Linear interpolation of natural-order lattice samples at frequency xi;
/// returns false (and zero) outside the lattice.
bool interpolate_on_lattice(const Grid& grid, std::span<const cplx> values, double xi, cplx& out);

/// Largest modulus over the outer 5% of the frequency lattice relative to the global max.
double edge_fraction(std::span<const cplx> values);

/// J(t)u = x u + 2 i t d_x u.
Field galilean_J(const Field& u, double t);

/// L2 norm of J[|z|^2 z] - (2|z|^2 J z - z^2 conj(J z)); the cubic product is dealiased.
double chain_rule_residual(const Field& z, double t);

}  // namespace dmnls
