#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "chemflow/grid.hpp"
#include "chemflow/operators.hpp"
#include "chemflow/solver.hpp"

using namespace chemflow;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("Neumann Poisson solve recovers a manufactured discrete solution") {
  const Grid g = Grid::make(48, 40, 1.0, 1.2);
  ScalarField q_exact(g, BcType::neumann);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      q_exact.at(i, j) = std::cos(kPi * g.xc(i)) * std::cos(2.0 * kPi * g.yc(j) / g.ly);
  // zero-mean normalization is part of the contract
  const double mean = sum(q_exact.values) / g.cells();
  for (double& v : q_exact.values) v -= mean;

  const ScalarField rhs = laplacian(q_exact);
  std::vector<double> q(q_exact.values.size(), 0.0);
  const IterSolve info = solve_poisson_neumann(g, rhs.values, q, 1e-12, 0);
  REQUIRE(info.converged);
  double err = 0.0;
  for (size_t k = 0; k < q.size(); ++k)
    err = std::max(err, std::abs(q[k] - q_exact.values[k]));
  REQUIRE(err < 1e-8);
}

TEST_CASE("Neumann Poisson handles incompatible right-hand sides by mean removal") {
  const Grid g = Grid::make(16, 16, 1.0, 1.0);
  std::vector<double> rhs(static_cast<size_t>(g.cells()), 0.0);
  rhs[5] = 1.0;  // nonzero mean
  std::vector<double> q(rhs.size(), 0.0);
  const IterSolve info = solve_poisson_neumann(g, rhs, q, 1e-11, 0);
  REQUIRE(info.converged);
  REQUIRE(std::abs(sum(q)) < 1e-10);
}

TEST_CASE("Poisson solve reports failure when starved of iterations") {
  const Grid g = Grid::make(32, 32, 1.0, 1.0);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> rhs(static_cast<size_t>(g.cells()));
  for (double& v : rhs) v = dist(rng);
  std::vector<double> q(rhs.size(), 0.0);
  REQUIRE_THROWS_AS(solve_poisson_neumann(g, rhs, q, 1e-12, 2), SolverError);
}

TEST_CASE("Neumann Helmholtz solve is exact on constants and accurate on fluctuations") {
  const Grid g = Grid::make(32, 32, 1.0, 1.0);
  const double dt = 0.01;

  ScalarField x_exact(g, BcType::neumann);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      x_exact.at(i, j) = 4.0 + 0.3 * std::cos(kPi * g.xc(i)) * std::cos(kPi * g.yc(j));
  const ScalarField lap = laplacian(x_exact);
  std::vector<double> rhs(x_exact.values.size());
  for (size_t k = 0; k < rhs.size(); ++k)
    rhs[k] = x_exact.values[k] - dt * lap.values[k];

  std::vector<double> x(rhs.size(), 0.0);
  solve_helmholtz_neumann(g, rhs, x, dt, 1e-12, 0);
  double err = 0.0;
  for (size_t k = 0; k < x.size(); ++k)
    err = std::max(err, std::abs(x[k] - x_exact.values[k]));
  REQUIRE(err < 1e-10);

  // pure constant: solved without any iteration error at all
  std::vector<double> rhs_const(rhs.size(), 2.5);
  std::vector<double> xc(rhs.size(), 0.0);
  const IterSolve info = solve_helmholtz_neumann(g, rhs_const, xc, dt, 1e-12, 0);
  REQUIRE(info.iterations == 0);
  for (double v : xc) REQUIRE(v == 2.5);
}

TEST_CASE("velocity Helmholtz solves keep wall faces pinned to zero") {
  const Grid g = Grid::make(24, 24, 1.0, 1.0);
  const double dt = 0.02;
  VectorField u(g);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : u.u1) v = dist(rng);
  for (double& v : u.u2) v = dist(rng);
  u.enforce_no_slip();

  VectorField x = u;
  solve_helmholtz_velocity(g, 1, u.u1, x.u1, dt, 1e-11, 0);
  solve_helmholtz_velocity(g, 2, u.u2, x.u2, dt, 1e-11, 0);
  for (int j = 0; j < g.ny; ++j) {
    REQUIRE(x.u1_at(0, j) == 0.0);
    REQUIRE(x.u1_at(g.nx, j) == 0.0);
  }
  for (int i = 0; i < g.nx; ++i) {
    REQUIRE(x.u2_at(i, 0) == 0.0);
    REQUIRE(x.u2_at(i, g.ny) == 0.0);
  }

  // residual check against the operator definition
  std::vector<double> out(x.u1.size());
  detail::apply_helmholtz_velocity<1>(g, dt, x.u1, out);
  double res = 0.0, bn = 0.0;
  for (size_t k = 0; k < out.size(); ++k) {
    res = std::max(res, std::abs(out[k] - u.u1[k]));
    bn = std::max(bn, std::abs(u.u1[k]));
  }
  REQUIRE(res <= 1e-9 * bn);
}

TEST_CASE("implicit diffusion contracts the L2 norm") {
  const Grid g = Grid::make(32, 32, 1.0, 1.0);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> b(static_cast<size_t>(g.cells()));
  for (double& v : b) v = dist(rng);
  std::vector<double> x(b.size(), 0.0);
  solve_helmholtz_neumann(g, b, x, 0.05, 1e-12, 0);
  double nb = 0.0, nx = 0.0;
  for (size_t k = 0; k < b.size(); ++k) {
    nb += b[k] * b[k];
    nx += x[k] * x[k];
  }
  REQUIRE(nx <= nb * (1.0 + 1e-12));
}
