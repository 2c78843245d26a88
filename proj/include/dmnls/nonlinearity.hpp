#pragma once

#include <span>
#include <vector>

#include "dmnls/dispersion.hpp"
#include "dmnls/grid.hpp"

namespace dmnls {

/// Pointwise |z|^2 z. With `dealias` the product is formed on the 2n-point
/// refinement and truncated back to the n-mode lattice, which is the exact
/// projection of the cubic of the band-limited interpolant.
Field cubic(const Field& z, bool dealias = true);

struct NonlinearityOptions {
  bool dealias = true;
  /// Worker threads for the tau-node loop. The reduction order does not
  /// depend on this value.
  unsigned threads = 1;
};

/// N[u] = c * sum_k w_k e^{-i D_k Delta} { |e^{i D_k Delta} u|^2 e^{i D_k Delta} u },
/// the tau-average discretized by a TauQuadrature.
///
/// Nodes with equal D (the two mirrored branches of a symmetric tent) are
/// merged and their weights added; the multipliers e^{-i D xi^2} are computed
/// once at construction. Holds scratch buffers, so one instance must not be
/// used from two threads at once.
class AveragedNonlinearity {
 public:
  AveragedNonlinearity(GridPtr grid, const TauQuadrature& q, double c,
                       NonlinearityOptions opt = {});

  /// u_hat: natural-order transform of u. Writes the transform of N[u] into out.
  void apply(std::span<const cplx> u_hat, std::span<cplx> out);

  /// Position in, position out.
  Field operator()(const Field& u);

  /// int_0^1 || e^{i D(tau) Delta} u ||_{L^4}^4 dtau (no factor c).
  double quartic_average(std::span<const cplx> u_hat);

  std::size_t distinct_nodes() const { return nodes_.size(); }
  const Grid& grid() const { return *grid_; }
  double c() const { return c_; }

 private:
  struct Node {
    double D;
    double weight;
    std::vector<cplx> multiplier;  // e^{-i D xi^2}
  };
  struct Workspace {
    std::vector<cplx> spectral;
    std::vector<cplx> physical;
  };

  void node_contribution(const Node& node, std::span<const cplx> u_hat, std::span<cplx> out,
                         Workspace& ws) const;
  Workspace make_workspace() const;

  GridPtr grid_;
  double c_;
  NonlinearityOptions opt_;
  std::vector<Node> nodes_;
  std::vector<Workspace> workspaces_;
  std::vector<std::vector<cplx>> partial_;
};

/// One-shot evaluation on a position-space field.
Field averaged_nonlinearity(const Field& u, const TauQuadrature& q, double c,
                            NonlinearityOptions opt = {});

/// L2 norm of N[e^{i theta} u] - e^{i theta} N[u].
double gauge_covariance_check(const Field& u, const TauQuadrature& q, double c, double theta);

/// In-place pairwise (tree) summation of equally sized arrays into parts[0].
void pairwise_sum(std::vector<std::vector<cplx>>& parts);

}  // namespace dmnls
