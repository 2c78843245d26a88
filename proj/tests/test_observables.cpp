#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dmnls/integrator.hpp"
#include "dmnls/observables.hpp"
#include "dmnls/propagator.hpp"

using namespace dmnls;

namespace {

std::vector<cplx> gaussian_hat(const GridPtr& g, double amp) {
  const Field u = Field::from_position_function(g, [&](double x) { return cplx(amp * std::exp(-x * x)); });
  const Field f = forward_transform(u);
  return {f.values().begin(), f.values().end()};
}

}  // namespace

TEST_CASE("zero state") {
  auto g = Grid::make(256, 40.0);
  const std::vector<cplx> z(256);
  const ProfileView p{g, 2.0, z, 1.0};
  CHECK(x_d_norm(p) == 0.0);
  CHECK(x_e_norm(p).value == 0.0);
  const auto [lhs, rhs] = pointwise_decay_bound(p);
  CHECK(lhs == 0.0);
  CHECK(rhs == 0.0);
  AveragedNonlinearity op(g, build_quadrature(DispersionProfile{}, 4), 1.0);
  const auto r = compute_observables(p, op);
  CHECK(r.mass == 0.0);
  CHECK(r.energy == 0.0);
  CHECK(r.boundary_mass_fraction == 0.0);
  CHECK(*r.lemma_ratio == 0.0);
}

TEST_CASE("X_D is the sup of the profile") {
  auto g = Grid::make(256, 40.0);
  const double h = 0.37;
  const Field f = Field::from_frequency_function(g, [&](double k) { return cplx(h * std::exp(-std::pow(k / 2, 8))); });
  const ProfileView p{g, 3.0, f.values(), 1.0};
  CHECK(x_d_norm(p) == doctest::Approx(h).epsilon(1e-12));
  CHECK_THROWS_AS(x_d_norm({g, 0.5, f.values(), 1.0}), std::domain_error);
  CHECK_THROWS_AS(x_e_norm({g, 0.5, f.values(), 1.0}), std::domain_error);
  CHECK_THROWS_AS(pointwise_decay_bound({g, 0.99, f.values(), 1.0}), std::domain_error);
}

TEST_CASE("X_E at t = 1 is the plain sum, and J(t)u matches x f") {
  auto g = Grid::make(4096, 400.0);
  const auto fh = gaussian_hat(g, 0.2);
  const ProfileView p{g, 1.0, fh, 1.0};
  const auto xe = x_e_norm(p);
  const Field u0 = inverse_transform(Field(g, fh, Space::frequency));
  CHECK(xe.value == doctest::Approx(norm(u0, NormKind::H1) + norm(u0, NormKind::weightedL2)).epsilon(1e-12));
  for (double t : {1.0, 4.0, 9.0}) {
    const auto r = x_e_norm({g, t, fh, 1.0});
    CHECK(std::abs(r.j_norm - r.xf_norm) < 1e-6 * r.xf_norm);
    CHECK(r.value == doctest::Approx(std::pow(t, -kRateExponent) * (norm(u0, NormKind::H1) + r.xf_norm)));
  }
  // d_av rescales time in J
  const auto r2 = x_e_norm({g, 2.0, fh, 2.5});
  CHECK(std::abs(r2.j_norm - r2.xf_norm) < 1e-6 * r2.xf_norm);
}

TEST_CASE("linear decay: ||u(t)||_inf sqrt(t) -> ||u0^||_inf / sqrt(2)") {
  // the profile is frozen under the free flow
  auto g = Grid::make(16384, 3200.0);
  const auto fh = gaussian_hat(g, 0.05);
  const double target = sup_norm(fh) / std::sqrt(2.0);
  double prev_gap = INFINITY;
  for (double t : {10.0, 30.0, 100.0}) {
    const auto [lhs, rhs] = pointwise_decay_bound({g, t, fh, 1.0});
    const double gap = std::abs(lhs * std::sqrt(t) - target) / target;
    CHECK(gap < prev_gap);
    prev_gap = gap;
    CHECK(lhs <= 2.0 * rhs);
  }
  CHECK(prev_gap < 1e-3);
  const Field u0 = inverse_transform(Field(g, fh, Space::frequency));
  CHECK(std::abs(norm(factorized_evolve(u0, 100.0).field, NormKind::Linf) * 10.0 - target) / target < 1e-3);
}

TEST_CASE("energy, mass and boundary fraction") {
  auto g = Grid::make(1024, 60.0);
  const double a = 0.3;
  const auto fh = gaussian_hat(g, a);
  const double r = std::sqrt(std::numbers::pi / 2);
  AveragedNonlinearity lin(g, build_quadrature(DispersionProfile{}, 8), 0.0);
  // c = 0: E = d_av ||u'||^2 = d_av a^2 sqrt(pi/2)
  CHECK(energy({g, 0.0, fh, 2.0}, lin) == doctest::Approx(2.0 * a * a * r).epsilon(1e-10));
  // quartic part, D = 0: (c/2) ||u||_4^4 = (c/2) a^4 sqrt(pi)/2
  AveragedNonlinearity flat(g, build_quadrature(DispersionProfile::constant(1.0), 2), 3.0);
  CHECK(energy({g, 0.0, fh, 1.0}, flat) ==
        doctest::Approx(a * a * r + 1.5 * std::pow(a, 4) * std::sqrt(std::numbers::pi) / 2).epsilon(1e-10));
  const auto rec = compute_observables({g, 0.0, fh, 1.0}, flat);
  CHECK(rec.mass == doctest::Approx(a * a * r).epsilon(1e-12));
  CHECK_FALSE(rec.x_d.has_value());
  CHECK_FALSE(rec.lemma_ratio.has_value());

  std::vector<cplx> edge(1024);
  edge[3] = 1.0;
  edge[500] = 1.0;
  CHECK(boundary_mass_fraction(*g, edge) == doctest::Approx(0.5));
}

TEST_CASE("observables.csv round trip") {
  SimConfig c;
  c.n = 256;
  c.length = 64.0;
  c.t_end = 2.0;
  c.quad_order = 4;
  Simulator sim(c);
  const auto res = sim.run();
  std::vector<ObservablesRecord> recs;
  for (const auto& s : res.trajectory) recs.push_back(s.obs);
  const auto text = observables_csv(recs);
  CHECK(text.rfind("t,mass,energy,linf_u,h1_u,h11_u,x_d,x_e,j_norm,xf_norm,boundary_mass_fraction,lemma_ratio\n", 0) == 0);
  const auto back = parse_observables_csv(text);
  REQUIRE(back.size() == recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k) {
    CHECK(back[k].t == recs[k].t);
    CHECK(back[k].energy == recs[k].energy);
    CHECK(back[k].x_e == recs[k].x_e);
    CHECK(back[k].lemma_ratio == recs[k].lemma_ratio);
    CHECK(back[k].x_d.has_value() == (recs[k].t >= 1.0));
  }
  CHECK_THROWS(parse_observables_csv("bogus\n"));
}
