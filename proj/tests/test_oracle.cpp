#include <doctest.h>

#include <cmath>

#include "dmnls/oracle.hpp"
#include "dmnls/propagator.hpp"

using namespace dmnls;

namespace {

SimConfig flat(double eps, double t_end, std::size_t n, double L) {
  SimConfig c;
  c.epsilon = eps;
  c.n = n;
  c.length = L;
  c.t_end = t_end;
  c.dt = 0.05;
  c.profile = DispersionProfile::constant(1.0);
  return c;
}

}  // namespace

TEST_CASE("Strang step basics") {
  auto g = Grid::make(512, 40.0);
  const Field u = Field::from_position_function(g, [](double x) { return std::polar(0.4 * std::exp(-x * x), 0.3 * x); });
  CHECK(sup_distance(strang_step(u, 0.1, 0.0), free_evolve(u, 0.1)) < 1e-15);
  CHECK(norm(strang_step(Field::zeros(g, Space::position), 0.1, 1.0), NormKind::Linf) == 0.0);
  Field v = u;
  for (int k = 0; k < 100; ++k) v = strang_step(v, 0.05, 2.0);
  CHECK(std::abs(norm(v, NormKind::L2) - norm(u, NormKind::L2)) < 1e-13);
  CHECK_THROWS_AS(strang_step(u, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("oracle requires D = 0") {
  auto c = flat(0.1, 1.0, 256, 40.0);
  c.profile = DispersionProfile{};
  CHECK_THROWS_AS(run_oracle(c), std::invalid_argument);
}

TEST_CASE("oracle is second order") {
  const auto r = oracle_order(flat(0.2, 10.0, 2048, 400.0));
  CHECK(r.order >= 1.8);
  CHECK(r.order <= 2.3);
  CHECK(r.passed);
}

TEST_CASE("oracle and interaction-picture RK4 agree when D = 0") {
  auto c = flat(0.1, 10.0, 2048, 400.0);
  const auto a = integrate_to(c, 0.01);
  const auto b = oracle_integrate_to(c, 0.01);
  const auto g = Grid::make(c.n, c.length);
  const auto ua = reconstruct_u({g, 10.0, a, 1.0});
  const auto ub = reconstruct_u({g, 10.0, b, 1.0});
  double m = 0.0;
  for (std::size_t i = 0; i < ua.size(); ++i) m = std::max(m, std::abs(ua[i] - ub[i]));
  CHECK(m < 1e-6);
}

TEST_CASE("oracle run: snapshots, mass, small-data decay") {
  auto c = flat(0.1, 100.0, 16384, 3200.0);
  const auto r = run_oracle(c);
  REQUIRE(r.status == RunStatus::completed);
  CHECK(r.trajectory.back().t == 100.0);
  CHECK(r.stats.max_mass_drift < 1e-11);  // 2000 isometric steps, roundoff only
  double lo = INFINITY, hi = 0.0;
  for (const auto& s : r.trajectory) {
    if (s.t < 1.0) continue;
    const double v = s.obs.linf_u * std::sqrt(s.t);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(hi < 2.0 * lo);
}
