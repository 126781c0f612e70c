#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chemflow/chemo.hpp"
#include "chemflow/functionals.hpp"

using namespace chemflow;

TEST_CASE("entropy density vanishes at the carrying capacity") {
  REQUIRE(entropy_h(0.5, 1.0, 2.0) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(entropy_h(0.0, 1.0, 2.0) == Catch::Approx(0.5));
  REQUIRE_THROWS_AS(entropy_h(1.0, -1.0, 1.0), std::domain_error);
  REQUIRE_THROWS_AS(entropy_h(-0.5, 1.0, 1.0), std::domain_error);
}

TEST_CASE("entropy density is convex and nonnegative") {
  REQUIRE(entropy_h(0.5, 1.0, 1.0) + entropy_h(1.5, 1.0, 1.0) >=
          2.0 * entropy_h(1.0, 1.0, 1.0));
  const std::pair<double, double> params[] = {{1.0, 1.0}, {1.0, 20.0}, {0.3, 2.5}};
  for (const auto& [r, mu] : params) {
    const double s_max = 100.0 * r / mu;
    for (int k = 0; k < 1000000; ++k) {
      const double s = s_max * k / 999999.0;
      if (entropy_h(s, r, mu) < -1e-15) {
        FAIL("H(" << s << ") negative for r=" << r << " mu=" << mu);
      }
    }
  }
  SUCCEED();
}

TEST_CASE("energy of the exact equilibrium vanishes in the positive regime") {
  SimParams p;
  p.grid = Grid::make(16, 16, 1.0, 1.0);
  p.r = 1.0;
  p.mu = 2.0;
  p.chi = 0.5;
  State s;
  s.n = ScalarField(p.grid, BcType::neumann, p.r / p.mu);
  s.w = ScalarField(p.grid, BcType::neumann, 3.0);
  s.u = VectorField(p.grid);
  const EnergyReport rep = energy(s, p, 10.0);
  REQUIRE(rep.regime == EnergyRegime::positive_r);
  REQUIRE(std::abs(rep.f_value) <= 1e-14);
  REQUIRE(rep.h_integral >= -1e-15);
  REQUIRE(rep.grad_w_sq == 0.0);
}

TEST_CASE("shifted functional cancels for n = exp(-a) and isolates the gradient term") {
  SimParams p;
  p.grid = Grid::make(16, 16, 1.0, 1.0);
  p.r = 0.0;
  p.mu = 1.0;
  p.chi = 0.8;
  const double a = 10.0;
  State s;
  s.n = ScalarField(p.grid, BcType::neumann, std::exp(-a));
  s.w = ScalarField(p.grid, BcType::neumann);
  for (int j = 0; j < p.grid.ny; ++j)
    for (int i = 0; i < p.grid.nx; ++i)
      s.w.at(i, j) = 0.3 * p.grid.xc(i) * p.grid.xc(i);
  s.u = VectorField(p.grid);
  const EnergyReport rep = energy(s, p, a);
  REQUIRE(rep.regime == EnergyRegime::nonpositive_r);
  REQUIRE(std::abs(rep.h_integral) <= 1e-14);
  REQUIRE(rep.f_value == Catch::Approx(0.5 * p.chi * rep.grad_w_sq));

  // zero density: only the gradient term remains
  for (double& v : s.n.values) v = 0.0;
  const EnergyReport rep0 = energy(s, p, a);
  REQUIRE(rep0.h_integral == 0.0);
  REQUIRE(rep0.f_value == Catch::Approx(0.5 * p.chi * rep0.grad_w_sq));
}

TEST_CASE("norms of the uniform equilibrium state vanish") {
  SimParams p;
  p.grid = Grid::make(16, 16, 1.0, 1.0);
  p.r = 2.0;
  p.mu = 4.0;
  State s;
  s.n = ScalarField(p.grid, BcType::neumann, 0.5);
  s.w = ScalarField(p.grid, BcType::neumann, 1.0);
  s.u = VectorField(p.grid);
  s.c0_max = 1.0;
  const FieldNorms nm = norms(s, p);
  REQUIRE(nm.dev_inf == 0.0);
  REQUIRE(nm.grad_w_l2 == 0.0);
  REQUIRE(nm.grad_w_l6 == 0.0);
  REQUIRE(nm.grad_w_linf == 0.0);
  REQUIRE(nm.u_l2 == 0.0);
  REQUIRE(nm.u_linf == 0.0);
}

TEST_CASE("norms integrate an indicator-like bump exactly") {
  SimParams p;
  p.grid = Grid::make(16, 16, 1.0, 1.0);
  p.r = 0.0;
  p.mu = 1.0;
  State s;
  s.n = ScalarField(p.grid, BcType::neumann, 0.0);
  // height 2 over exactly one quarter of the unit square
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) s.n.at(i, j) = 2.0;
  s.w = ScalarField(p.grid, BcType::neumann, 0.0);
  s.u = VectorField(p.grid);
  const FieldNorms nm = norms(s, p);
  REQUIRE(nm.mass == Catch::Approx(0.5));
  REQUIRE(nm.linf_n == 2.0);
}

TEST_CASE("gradient norms agree between norms() and energy() quadrature") {
  SimParams p;
  p.grid = Grid::make(24, 24, 1.3, 0.7);
  p.r = 1.0;
  p.mu = 1.0;
  p.chi = 1.0;
  p.init.preset = "gauss-bump";
  const State s = init_state(p);
  const FieldNorms nm = norms(s, p);
  const EnergyReport rep = energy(s, p, 10.0);
  REQUIRE(nm.grad_w_l2 * nm.grad_w_l2 == Catch::Approx(rep.grad_w_sq).epsilon(1e-13));
}

TEST_CASE("derived constants follow the rectangle spectra") {
  SimParams p;
  p.grid = Grid::make(16, 16, 2.0, 1.0);
  p.mu = 4.0;
  const DerivedConstants c = derived_constants(p, 0.5);
  REQUIRE(c.gamma == Catch::Approx(2.0 / (4.0 * 0.5)));
  const double pi = std::numbers::pi;
  REQUIRE(c.lambda1 == Catch::Approx(std::min(pi * pi / 4.0, pi * pi)));
  REQUIRE(c.cp_dirichlet == Catch::Approx(pi * pi / 4.0 + pi * pi));
  REQUIRE(c.cp_dirichlet > c.lambda1);
  REQUIRE(c.gamma > 0.0);
  REQUIRE_THROWS_AS(derived_constants(p, 0.0), std::domain_error);
}
