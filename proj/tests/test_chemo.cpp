#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "chemflow/chemo.hpp"
#include "chemflow/functionals.hpp"
#include "chemflow/oracles.hpp"

using namespace chemflow;

namespace {

SimParams base_params(int n, double lx = 1.0, double ly = 1.0) {
  SimParams p;
  p.grid = Grid::make(n, n, lx, ly);
  return p;
}

}  // namespace

TEST_CASE("uniform preset maps to the trivial transformed state") {
  SimParams p = base_params(16);
  p.init.preset = "uniform";
  const State s = init_state(p);
  REQUIRE(max_abs(s.w.values) == 0.0);
  REQUIRE(linf(s.u) == 0.0);
  REQUIRE(integrate(s.n) == Catch::Approx(1.0));
  REQUIRE(s.c0_max == 1.0);
}

TEST_CASE("gauss-bump preset is normalized by the transform") {
  SimParams p = base_params(32);
  p.init.preset = "gauss-bump";
  const State s = init_state(p);
  REQUIRE(min_value(s.w) == 0.0);
  REQUIRE(max_value(s.w) > 0.0);
  REQUIRE(integrate(s.n) > 0.0);
  REQUIRE(min_value(s.n) >= 0.0);
}

TEST_CASE("recovered signal round-trips through the transform") {
  SimParams p = base_params(24);
  p.init.preset = "two-bump";
  p.init.c_amp = 3.0;
  const State s = init_state(p);
  const ScalarField c = recover_c(s);
  REQUIRE(max_value(c) <= s.c0_max * (1.0 + 1e-15));
  REQUIRE(min_value(c) > 0.0);
  for (size_t k = 0; k < c.values.size(); ++k) {
    const double w_back = -std::log(c.values[k] / s.c0_max);
    REQUIRE(w_back == Catch::Approx(s.w.values[k]).margin(1e-12));
  }
}

TEST_CASE("vortex preset starts divergence-free") {
  SimParams p = base_params(32);
  p.init.preset = "vortex-fluid";
  p.init.u_amp = 0.5;
  const State s = init_state(p);
  REQUIRE(linf(s.u) > 0.1);
  REQUIRE(linf(divergence(s.u)) <= 1e-10);
}

TEST_CASE("init rejects bad presets and amplitudes") {
  SimParams p = base_params(16);
  p.init.preset = "swirl";
  REQUIRE_THROWS_AS(init_state(p), ConfigError);
  p.init.preset = "uniform";
  p.init.c_amp = 0.0;
  REQUIRE_THROWS_AS(init_state(p), ConfigError);
  p.init.c_amp = 1.0;
  p.init.n_amp = -1.0;
  REQUIRE_THROWS_AS(init_state(p), ConfigError);
}

TEST_CASE("cfl_dt falls back to dt_max on quiescent fields and scales with velocity") {
  SimParams p = base_params(16);
  p.dt_max = 0.125;
  p.dt_safety = 0.4;
  State s = init_state(p);
  REQUIRE(cfl_dt(s, p) == Catch::Approx(0.4 * 0.125));

  // a dominant velocity limit halves when the velocity doubles
  p.dt_max = 1e9;
  for (int j = 0; j < p.grid.ny; ++j)
    for (int i = 1; i < p.grid.nx; ++i) s.u.u1_at(i, j) = 2.0;
  const double dt1 = cfl_dt(s, p);
  for (int j = 0; j < p.grid.ny; ++j)
    for (int i = 1; i < p.grid.nx; ++i) s.u.u1_at(i, j) = 4.0;
  const double dt2 = cfl_dt(s, p);
  REQUIRE(dt2 == Catch::Approx(0.5 * dt1));
}

TEST_CASE("uniform data follows the logistic solution and stays uniform") {
  SimParams p = base_params(8);
  p.init.preset = "uniform";
  p.init.n_amp = 0.5;
  p.r = 1.0;
  p.mu = 1.0;
  p.chi = 0.5;
  p.gravity = {0.0, 0.0};
  p.dt_max = 1e-3;
  p.t_end = 1.0;
  FluidConfig fcfg;
  State s = init_state(p);
  const double guard = blowup_guard_reference(s, p);
  while (s.t < p.t_end) {
    double dt = cfl_dt(s, p);
    dt = std::min(dt, p.t_end - s.t);
    s = step_system_dt(s, p, fcfg, dt);
  }
  const double expect = logistic_solution(0.5, 1.0, 1.0, 1.0);
  const double mean = integrate(s.n) / p.grid.area();
  REQUIRE(std::abs(mean - expect) <= 1e-3);
  REQUIRE(max_value(s.n) - min_value(s.n) <= 1e-12);
  REQUIRE(max_abs(s.w.values) - 0.0 >= 0.0);  // w grew uniformly
  REQUIRE(max_value(s.w) - min_value(s.w) <= 1e-12);
  REQUIRE(linf(s.u) == 0.0);
  (void)guard;
}

TEST_CASE("zero density decouples the signal equation") {
  SimParams p = base_params(24);
  p.init.preset = "gauss-bump";
  p.r = 0.0;
  p.mu = 1.0;
  FluidConfig fcfg;
  State s = init_state(p);
  for (double& v : s.n.values) v = 0.0;  // switch the source off
  double prev = dirichlet_energy(s.w);
  for (int k = 0; k < 20; ++k) {
    s = step_system_dt(s, p, fcfg, 0.005);
    REQUIRE(max_abs(s.n.values) == 0.0);
    const double cur = dirichlet_energy(s.w);
    REQUIRE(cur <= prev * (1.0 + 1e-12));
    prev = cur;
  }
}

TEST_CASE("per-step mass change matches the logistic identity discretely") {
  SimParams p = base_params(64);
  p.init.preset = "gauss-bump";
  p.r = 0.0;
  p.mu = 1.0;
  p.chi = 0.5;
  p.gravity = {0.0, -1.0};
  FluidConfig fcfg;
  State s = init_state(p);
  for (int k = 0; k < 5; ++k) {
    const double dt = cfl_dt(s, p);
    const double mass_before = integrate(s.n);
    double n_sq = 0.0;
    for (double v : s.n.values) n_sq += v * v;
    n_sq *= p.grid.cell_area();
    const State next = step_system_dt(s, p, fcfg, dt);
    const double measured = integrate(next.n) - mass_before;
    const double predicted = dt * (p.r * mass_before - p.mu * n_sq);
    REQUIRE(measured == Catch::Approx(predicted).epsilon(0.02));
    s = next;
  }
}

TEST_CASE("per-step signal-mass balance matches its identity") {
  SimParams p = base_params(64);
  p.init.preset = "gauss-bump";
  p.r = 0.0;
  p.mu = 1.0;
  p.chi = 0.5;
  FluidConfig fcfg;
  State s = init_state(p);
  for (int k = 0; k < 5; ++k) {
    const double dt = cfl_dt(s, p);
    const double w_mass = integrate(s.w);
    const double gw2 = dirichlet_energy(s.w);
    const double n_mass = integrate(s.n);
    const State next = step_system_dt(s, p, fcfg, dt);
    const double lhs = (integrate(next.w) - w_mass) / dt;
    const double rhs = -gw2 + n_mass;
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
    REQUIRE(std::abs(lhs - rhs) / scale <= 0.02);
    s = next;
  }
}

TEST_CASE("positivity and the signal maximum principle hold along a run") {
  SimParams p = base_params(32);
  p.init.preset = "gauss-bump";
  p.r = 0.0;
  p.mu = 1.0;
  p.chi = 0.5;
  p.gravity = {0.0, -1.0};
  FluidConfig fcfg;
  State s = init_state(p);
  const double mass0 = integrate(s.n);
  double c_max_prev = norms(s, p).c_max;
  for (int k = 0; k < 60; ++k) {
    s = step_system_dt(s, p, fcfg, cfl_dt(s, p));
    REQUIRE(min_value(s.n) >= 0.0);
    REQUIRE(min_value(s.w) >= 0.0);
    const FieldNorms nm = norms(s, p);
    REQUIRE(nm.c_max <= c_max_prev * (1.0 + 1e-12));
    REQUIRE(nm.c_min > 0.0);
    c_max_prev = nm.c_max;
  }
  REQUIRE(s.clamped_mass_cum <= 1e-8 * mass0);
}

TEST_CASE("L1 mass stays under the comparison envelope for r = 0") {
  SimParams p = base_params(32);
  p.init.preset = "gauss-bump";
  p.r = 0.0;
  p.mu = 1.0;
  p.chi = 0.5;
  FluidConfig fcfg;
  State s = init_state(p);
  const DerivedConstants consts = derived_constants(p, integrate(s.n));
  while (s.t < 5.0) {
    s = step_system_dt(s, p, fcfg, cfl_dt(s, p));
    const double bound = l1_decay_bound(consts, p.grid.area(), p.mu, s.t);
    REQUIRE(integrate(s.n) <= 1.05 * bound);
  }
}

TEST_CASE("the blow-up guard trips on runaway density") {
  SimParams p = base_params(16);
  p.init.preset = "uniform";
  p.init.n_amp = 1.0;
  p.r = 1.0;
  p.mu = 1.0;
  FluidConfig fcfg;
  State s = init_state(p);
  for (double& v : s.n.values) v *= 5e6;  // far beyond the guard reference
  REQUIRE_THROWS_AS(step_system(s, p, fcfg, 1.0), BlowupError);
}

TEST_CASE("the time step stabilizes to a positive plateau on a stiff run") {
  SimParams p = base_params(32);
  p.init.preset = "gauss-bump";
  p.r = 1.0;
  p.mu = 20.0;
  p.chi = 0.5;
  FluidConfig fcfg;
  State s = init_state(p);
  std::vector<double> dts;
  while (s.t < 3.0) {
    const double dt = cfl_dt(s, p);
    REQUIRE(dt > 0.0);
    dts.push_back(dt);
    s = step_system_dt(s, p, fcfg, dt);
  }
  // the last few steps should be at least as large as the stiffest early step
  const double early_min = *std::min_element(dts.begin(), dts.begin() + dts.size() / 2);
  const double late_min = *std::min_element(dts.end() - 10, dts.end());
  REQUIRE(late_min >= early_min);
  REQUIRE(late_min > 1e-4);
}
