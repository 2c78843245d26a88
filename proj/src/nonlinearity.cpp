#include "dmnls/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace dmnls {

Field cubic(const Field& z, bool dealias) {
  if (z.space() != Space::position)
    throw std::invalid_argument("cubic: expected a position-space field");
  const Grid& g = z.grid();
  std::vector<cplx> out(z.size());
  if (!dealias) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::norm(z[j]) * z[j];
    return Field(z.grid_ptr(), std::move(out), Space::position);
  }
  std::vector<cplx> fine(g.fine_n());
  g.to_frequency(z.values(), out);
  g.to_fine_position(out, fine);
  for (auto& v : fine) v *= std::norm(v);
  g.fine_to_frequency_consume(fine, out);
  g.to_position(out, out);
  return Field(z.grid_ptr(), std::move(out), Space::position);
}

void pairwise_sum(std::vector<std::vector<cplx>>& parts) {
  for (std::size_t stride = 1; stride < parts.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < parts.size(); i += 2 * stride) {
      auto& dst = parts[i];
      const auto& src = parts[i + stride];
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
  }
}

AveragedNonlinearity::AveragedNonlinearity(GridPtr grid, const TauQuadrature& q, double c,
                                           NonlinearityOptions opt)
    : grid_(std::move(grid)), c_(c), opt_(opt) {
  if (q.nodes.empty()) throw std::invalid_argument("AveragedNonlinearity: empty quadrature");
  if (opt_.threads == 0) opt_.threads = 1;
  auto sorted = q.nodes;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TauNode& a, const TauNode& b) { return a.D < b.D; });
  const auto xi = grid_->xi();
  for (const auto& tn : sorted) {
    if (!nodes_.empty() &&
        std::abs(nodes_.back().D - tn.D) <= 1e-13 * std::max(1.0, std::abs(tn.D))) {
      nodes_.back().weight += tn.weight;
      continue;
    }
    Node node{tn.D, tn.weight, std::vector<cplx>(grid_->n())};
    for (std::size_t i = 0; i < xi.size(); ++i)
      node.multiplier[i] = std::polar(1.0, -tn.D * xi[i] * xi[i]);
    nodes_.push_back(std::move(node));
  }
  const unsigned nw = std::min<unsigned>(opt_.threads, static_cast<unsigned>(nodes_.size()));
  for (unsigned k = 0; k < nw; ++k) workspaces_.push_back(make_workspace());
  partial_.assign(nodes_.size(), std::vector<cplx>(grid_->n()));
}

AveragedNonlinearity::Workspace AveragedNonlinearity::make_workspace() const {
  return {std::vector<cplx>(grid_->n()),
          std::vector<cplx>(opt_.dealias ? grid_->fine_n() : grid_->n())};
}

void AveragedNonlinearity::node_contribution(const Node& node, std::span<const cplx> u_hat,
                                             std::span<cplx> out, Workspace& ws) const {
  const Grid& g = *grid_;
  auto& s = ws.spectral;
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = u_hat[i] * node.multiplier[i];
  if (opt_.dealias) {
    g.to_fine_position(s, ws.physical);
    for (auto& v : ws.physical) v *= std::norm(v);
    g.fine_to_frequency_consume(ws.physical, s);
  } else {
    g.to_position(s, ws.physical);
    for (auto& v : ws.physical) v *= std::norm(v);
    g.to_frequency(ws.physical, s);
  }
  for (std::size_t i = 0; i < s.size(); ++i)
    out[i] = node.weight * std::conj(node.multiplier[i]) * s[i];
}

void AveragedNonlinearity::apply(std::span<const cplx> u_hat, std::span<cplx> out) {
  if (u_hat.size() != grid_->n() || out.size() != grid_->n())
    throw std::invalid_argument("AveragedNonlinearity::apply: length mismatch");
  const std::size_t nn = nodes_.size();
  const std::size_t nw = workspaces_.size();
  if (nw <= 1) {
    for (std::size_t k = 0; k < nn; ++k)
      node_contribution(nodes_[k], u_hat, partial_[k], workspaces_[0]);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < nw; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < nn; k += nw)
          node_contribution(nodes_[k], u_hat, partial_[k], workspaces_[w]);
      });
    }
  }
  pairwise_sum(partial_);
  const auto& sum = partial_[0];
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c_ * sum[i];
}

Field AveragedNonlinearity::operator()(const Field& u) {
  if (u.space() != Space::position)
    throw std::invalid_argument("averaged_nonlinearity: expected a position-space field");
  std::vector<cplx> u_hat(u.size()), out(u.size());
  grid_->to_frequency(u.values(), u_hat);
  apply(u_hat, out);
  grid_->to_position(out, out);
  return Field(u.grid_ptr(), std::move(out), Space::position);
}

double AveragedNonlinearity::quartic_average(std::span<const cplx> u_hat) {
  const Grid& g = *grid_;
  auto& ws = workspaces_[0];
  const double h = opt_.dealias ? 0.5 * g.dx() : g.dx();
  double total = 0.0;
  for (const auto& node : nodes_) {
    for (std::size_t i = 0; i < ws.spectral.size(); ++i)
      ws.spectral[i] = u_hat[i] * node.multiplier[i];
    if (opt_.dealias)
      g.to_fine_position(ws.spectral, ws.physical);
    else
      g.to_position(ws.spectral, ws.physical);
    double s = 0.0;
    for (const auto& v : ws.physical) {
      const double m = std::norm(v);
      s += m * m;
    }
    total += node.weight * s * h;
  }
  return total;
}

Field averaged_nonlinearity(const Field& u, const TauQuadrature& q, double c,
                            NonlinearityOptions opt) {
  AveragedNonlinearity op(u.grid_ptr(), q, c, opt);
  return op(u);
}

double gauge_covariance_check(const Field& u, const TauQuadrature& q, double c, double theta) {
  AveragedNonlinearity op(u.grid_ptr(), q, c);
  const cplx phase = std::polar(1.0, theta);
  std::vector<cplx> rotated(u.size());
  for (std::size_t j = 0; j < rotated.size(); ++j) rotated[j] = phase * u[j];
  const Field lhs = op(Field(u.grid_ptr(), std::move(rotated), Space::position));
  const Field base = op(u);
  std::vector<cplx> diff(u.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = lhs[j] - phase * base[j];
  return l2_norm(u.grid(), diff, Space::position);
}

}  // namespace dmnls
