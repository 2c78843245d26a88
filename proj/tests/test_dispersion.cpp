#include <doctest.h>

#include <cmath>
#include <functional>

#include "dmnls/dispersion.hpp"

using namespace dmnls;

TEST_CASE("default profile") {
  const auto p = DispersionProfile::from_map(3.0, 1.0, 0.5);
  CHECK(p.d_av == 1.0);
  CHECK_NOTHROW(p.validate());
  CHECK(p.is_tent());
  CHECK(D_of_tau(p, 0.0) == 0.0);
  CHECK(D_of_tau(p, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(D_of_tau(p, 0.5) == doctest::Approx(1.0));
  CHECK(D_of_tau(p, 0.25) == doctest::Approx(0.5));
  CHECK(D_of_tau(p, 0.75) == doctest::Approx(0.5));
  CHECK_THROWS_AS(D_of_tau(p, -0.1), std::domain_error);
  CHECK_THROWS_AS(D_of_tau(p, 1.1), std::domain_error);
}

TEST_CASE("profile validation") {
  auto p = DispersionProfile::from_map(1.0, 1.0, 0.5);  // d_av = 0
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  DispersionProfile q;
  q.d_av = 2.0;  // inconsistent with d_plus=3, d_minus=1, t_plus=1/2
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
  auto r = DispersionProfile::from_map(3.0, 1.0, 1.0);
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  const auto flat = DispersionProfile::constant(1.0);
  CHECK_NOTHROW(flat.validate());
  CHECK(D_of_tau(flat, 0.3) == 0.0);
  CHECK(D_of_tau(flat, 0.8) == 0.0);
  CHECK_FALSE(flat.is_tent());
}

TEST_CASE("D is continuous, piecewise linear, and peaks at t_plus") {
  const auto p = DispersionProfile::from_map(5.0, 0.5, 0.3);
  double mx = 0.0;
  double prev = D_of_tau(p, 0.0);
  for (int k = 1; k <= 10000; ++k) {
    const double tau = k / 10000.0;
    const double d = D_of_tau(p, tau);
    CHECK(std::abs(d - prev) < 1e-3);
    prev = d;
    mx = std::max(mx, std::abs(d));
  }
  CHECK(mx == doctest::Approx(D_of_tau(p, p.t_plus)));
  CHECK(D_of_tau(p, 1.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("Gauss-Legendre rule integrates polynomials exactly") {
  for (int order : {1, 2, 3, 8, 16, 32}) {
    std::vector<double> x, w;
    gauss_legendre(order, x, w);
    for (int deg = 0; deg <= 2 * order - 1; ++deg) {
      double s = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) s += w[k] * std::pow(x[k], deg);
      const double exact = (deg % 2 == 1) ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("quadrature construction") {
  const auto p = DispersionProfile::from_map(3.0, 1.0, 0.5);
  const auto mid = build_quadrature(p, 1);
  REQUIRE(mid.nodes.size() == 2);
  CHECK(mid.nodes[0].tau == doctest::Approx(0.25));
  CHECK(mid.nodes[1].tau == doctest::Approx(0.75));
  CHECK(mid.nodes[0].weight == doctest::Approx(0.5));
  CHECK(mid.nodes[1].weight == doctest::Approx(0.5));
  CHECK(mid.nodes[0].D == doctest::Approx(0.5));
  CHECK(mid.nodes[1].D == doctest::Approx(0.5));

  const auto q = build_quadrature(p, 16);
  CHECK(q.nodes.size() == 32);
  CHECK(std::abs(q.weight_sum() - 1.0) < 1e-15);
  for (const auto& n : q.nodes) CHECK(n.D >= 0.0);
  CHECK(q.min_D() >= 0.0);

  double iD = 0.0, iD2 = 0.0;
  for (const auto& n : q.nodes) {
    iD += n.weight * n.D;
    iD2 += n.weight * n.D * n.D;
  }
  CHECK(iD == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(iD2 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("negative-D profiles are accepted") {
  // d_plus < d_av: D dips below zero on the first piece
  const auto p = DispersionProfile::from_map(0.5, -1.5, 0.5);
  CHECK(p.d_av == doctest::Approx(1.0));
  const auto q = build_quadrature(p, 8);
  CHECK(q.min_D() < 0.0);
}

TEST_CASE("tent reduction oracle") {
  const auto p = DispersionProfile::from_map(3.0, 1.0, 0.5);
  const std::function<double(double)> one = [](double) { return 1.0; };
  const std::function<double(double)> lin = [](double a) { return a; };
  const std::function<double(double)> sq = [](double a) { return a * a; };
  CHECK(tent_reduction_oracle(p, one) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tent_reduction_oracle(p, lin) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(tent_reduction_oracle(p, sq) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK_THROWS_AS(tent_reduction_oracle(DispersionProfile::constant(1.0), one), std::invalid_argument);

  // asymmetric tent, smooth g: oracle vs Gauss quadrature
  const auto a = DispersionProfile::from_map(4.0, 2.0, 0.4);
  const std::function<double(double)> g = [](double d) { return std::cos(3 * d) / (1.0 + d); };
  const auto q = build_quadrature(a, 16);
  double s = 0.0;
  for (const auto& n : q.nodes) s += n.weight * g(n.D);
  CHECK(std::abs(s - tent_reduction_oracle(a, g, 2000)) < 1e-10);
}

TEST_CASE("quadrature converges for smooth integrands") {
  const auto p = DispersionProfile::from_map(3.0, 1.0, 0.5);
  auto integrate = [&](int order) {
    const auto q = build_quadrature(p, order);
    double s = 0.0;
    for (const auto& n : q.nodes) s += n.weight * std::exp(std::sin(4 * n.D));
    return s;
  };
  for (int k : {8, 16}) CHECK(std::abs(integrate(2 * k) - integrate(4 * k)) < 1e-10 * std::abs(integrate(4 * k)));
}

TEST_CASE("theta kernel") {
  const auto p = DispersionProfile::from_map(3.0, 1.0, 0.5);
  const auto q = build_quadrature(p, 16);
  for (double s : {1.0, 2.0, 10.0, 100.0}) {
    const double k = theta_kernel(q, 1.0, s);
    CHECK(k == doctest::Approx(0.5 * std::log1p(1.0 / s)).epsilon(1e-12));
    CHECK(theta_kernel_exact(p, s) == doctest::Approx(0.5 * std::log1p(1.0 / s)).epsilon(1e-14));
    CHECK(k >= 1.0 / (2 * (s + 1)));
    CHECK(k <= 1.0 / (2 * s));
  }
  const auto neg = build_quadrature(DispersionProfile::from_map(0.5, -1.5, 0.5), 4);
  CHECK_THROWS_AS(theta_kernel(neg, 1.0, 0.1), std::domain_error);
}
