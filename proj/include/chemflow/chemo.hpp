#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "chemflow/fluid.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/operators.hpp"
#include "chemflow/solver.hpp"

namespace chemflow {

// Initial-data presets. Arbitrary field ingestion is out of scope; these
// cover the reproducible scenarios the harness runs.
struct InitSpec {
  std::string preset = "uniform";  // uniform | gauss-bump | two-bump | vortex-fluid
  double n_amp = 1.0;
  double c_amp = 1.0;
  double u_amp = 0.5;  // vortex strength (vortex-fluid only)
};

struct SimParams {
  double chi = 0.5;  // chemotactic coefficient, > 0
  double r = 0.0;    // growth rate, any sign
  double mu = 1.0;   // crowding strength, > 0
  std::array<double, 2> gravity = {0.0, 0.0};  // constant grad(phi)
  Grid grid;
  double dt_safety = 0.4;
  double dt_max = 0.05;
  double t_end = 1.0;
  InitSpec init;

  void validate() const {
    if (!(chi > 0.0)) throw ConfigError("params: chi must be positive");
    if (!(mu > 0.0)) throw ConfigError("params: mu must be positive");
    if (!(dt_safety > 0.0) || dt_safety > 1.0)
      throw ConfigError("params: dt_safety must lie in (0, 1]");
    if (!(dt_max > 0.0)) throw ConfigError("params: dt_max must be positive");
    if (!(t_end > 0.0)) throw ConfigError("params: t_end must be positive");
    if (!std::isfinite(gravity[0]) || !std::isfinite(gravity[1]))
      throw ConfigError("params: gravity must be finite");
  }
};

// Discrete fields at one time level, in the transformed variables
// (n, w = -ln(c / max c0), u). c is recovered from w on demand.
struct State {
  double t = 0.0;
  ScalarField n;
  ScalarField w;
  VectorField u;
  ScalarField p;        // zero-mean pressure from the last projection
  double c0_max = 1.0;  // stored max of the initial signal, for c recovery
  double clamped_mass_cum = 0.0;  // total mass added by positivity clamping
  double last_div_residual = 0.0;
};

inline ScalarField recover_c(const State& s) {
  ScalarField c(s.n.grid, BcType::neumann);
  for (size_t k = 0; k < c.values.size(); ++k)
    c.values[k] = s.c0_max * std::exp(-s.w.values[k]);
  return c;
}

inline State init_state(const SimParams& params) {
  params.validate();
  const Grid& g = params.grid;
  if (g.nx == 0) throw ConfigError("params: grid not set");
  const InitSpec& init = params.init;
  if (!(init.c_amp > 0.0))
    throw ConfigError("init: signal amplitude must be positive");

  State s;
  s.n = ScalarField(g, BcType::neumann);
  s.w = ScalarField(g, BcType::neumann);
  s.u = VectorField(g);
  s.p = ScalarField(g, BcType::neumann);

  ScalarField c0(g, BcType::neumann);
  const double sigma = 0.1 * std::min(g.lx, g.ly);
  auto gauss = [&](double x, double y, double cx, double cy) {
    const double dx = x - cx, dy = y - cy;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
  };

  if (init.preset == "uniform") {
    if (!(init.n_amp > 0.0))
      throw ConfigError("init: density amplitude must be positive");
    for (double& v : s.n.values) v = init.n_amp;
    for (double& v : c0.values) v = init.c_amp;
  } else if (init.preset == "gauss-bump" || init.preset == "vortex-fluid") {
    if (!(init.n_amp > 0.0))
      throw ConfigError("init: density amplitude must be positive");
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        s.n.at(i, j) = init.n_amp * gauss(g.xc(i), g.yc(j), 0.5 * g.lx, 0.5 * g.ly);
        c0.at(i, j) = init.c_amp * (0.6 + 0.4 * g.xc(i) / g.lx);
      }
  } else if (init.preset == "two-bump") {
    if (!(init.n_amp > 0.0))
      throw ConfigError("init: density amplitude must be positive");
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        s.n.at(i, j) = init.n_amp * (gauss(g.xc(i), g.yc(j), 0.3 * g.lx, 0.5 * g.ly) +
                                     gauss(g.xc(i), g.yc(j), 0.7 * g.lx, 0.5 * g.ly));
        c0.at(i, j) = init.c_amp * (0.6 + 0.4 * g.xc(i) / g.lx);
      }
  } else {
    throw ConfigError("init: unknown preset '" + init.preset + "'");
  }

  s.c0_max = max_value(c0);
  for (size_t k = 0; k < c0.values.size(); ++k)
    s.w.values[k] = -std::log(c0.values[k] / s.c0_max);
  // the cell attaining the max maps to exactly 0
  for (double& v : s.w.values) v = std::max(v, 0.0);

  if (init.preset == "vortex-fluid") {
    const double pi = std::numbers::pi;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i)
        s.u.u1_at(i, j) = init.u_amp * std::sin(pi * g.xf(i) / g.lx) *
                          std::cos(pi * g.yc(j) / g.ly);
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        s.u.u2_at(i, j) = -init.u_amp * std::cos(pi * g.xc(i) / g.lx) *
                          std::sin(pi * g.yf(j) / g.ly);
    s.u.enforce_no_slip();
    Projection proj = project(s.u, 1e-12, 0, &s.p);
    s.u = std::move(proj.u);
    s.last_div_residual = linf(divergence(s.u));
  }
  return s;
}

// dt from the advective, chemotactic and reaction stiffness limits. The
// guard eps keeps quiescent fields on the dt_max branch.
inline double cfl_dt(const State& s, const SimParams& params) {
  const Grid& g = s.n.grid;
  constexpr double eps = 1e-30;
  const double u1m = max_abs(s.u.u1);
  const double u2m = max_abs(s.u.u2);
  const VectorField gw = gradient(s.w);
  const double w1m = max_abs(gw.u1);
  const double w2m = max_abs(gw.u2);
  const double ninf = linf(s.n);
  double dt = params.dt_max;
  dt = std::min(dt, g.dx / (u1m + eps));
  dt = std::min(dt, g.dy / (u2m + eps));
  dt = std::min(dt, g.dx / (params.chi * w1m + eps));
  dt = std::min(dt, g.dy / (params.chi * w2m + eps));
  dt = std::min(dt, 1.0 / (std::abs(params.r) + 2.0 * params.mu * ninf + eps));
  return params.dt_safety * dt;
}

namespace detail {

// Clamp a field at zero; returns the mass that clamping added.
inline double clamp_nonnegative(ScalarField& f) {
  double added = 0.0;
  for (double& v : f.values)
    if (v < 0.0) {
      added -= v;
      v = 0.0;
    }
  return added * f.grid.cell_area();
}

}  // namespace detail

// One splitting step at the given dt. Order is fixed: density, then signal,
// then fluid. Explicit transport/reaction with implicit diffusion for both
// scalars; the fluid substep is its own IMEX stage.
inline State step_system_dt(const State& s, const SimParams& params,
                            const FluidConfig& fluid_cfg, double dt) {
  const Grid& g = s.n.grid;
  State next = s;

  // density: n_t + u.grad n = lap n + chi div(n grad w) + n(r - mu n)
  {
    const ScalarField adv = advect(s.n, s.u);
    const ScalarField chem = chemotaxis_flux_div(s.n, s.w, params.chi);
    ScalarField star(g, BcType::neumann);
    for (size_t k = 0; k < star.values.size(); ++k) {
      const double nk = s.n.values[k];
      star.values[k] = nk + dt * (-adv.values[k] + chem.values[k] +
                                  nk * (params.r - params.mu * nk));
    }
    next.clamped_mass_cum += detail::clamp_nonnegative(star);
    next.n.values = s.n.values;  // warm start
    solve_helmholtz_neumann(g, star.values, next.n.values, dt,
                            fluid_cfg.poisson_tol, fluid_cfg.poisson_max_iter);
    next.clamped_mass_cum += detail::clamp_nonnegative(next.n);
  }

  // signal: w_t + u.grad w = lap w - |grad w|^2 + n
  {
    const ScalarField adv = advect(s.w, s.u);
    const ScalarField gw2 = grad_sq_cells(s.w);
    ScalarField star(g, BcType::neumann);
    for (size_t k = 0; k < star.values.size(); ++k)
      star.values[k] = s.w.values[k] + dt * (-adv.values[k] - gw2.values[k] +
                                             next.n.values[k]);
    detail::clamp_nonnegative(star);
    next.w.values = s.w.values;
    solve_helmholtz_neumann(g, star.values, next.w.values, dt,
                            fluid_cfg.poisson_tol, fluid_cfg.poisson_max_iter);
    detail::clamp_nonnegative(next.w);
  }

  // fluid: u_t + (u.grad)u = lap u + grad P + n grad(phi)
  {
    FluidStep fs = step_fluid(s.u, next.n, params.gravity, dt, fluid_cfg, &s.p);
    next.u = std::move(fs.u);
    next.p = std::move(fs.pressure);
    next.last_div_residual = linf(divergence(next.u));
  }

  next.t = s.t + dt;
  return next;
}

// Advances one CFL-chosen step and applies the blow-up guard. guard_ref is
// the initial ||n0||_inf + |r|/mu + 1 (see blowup_guard_reference).
inline State step_system(const State& s, const SimParams& params,
                         const FluidConfig& fluid_cfg, double guard_ref) {
  const double dt = cfl_dt(s, params);
  State next = step_system_dt(s, params, fluid_cfg, dt);
  const double ninf = linf(next.n);
  if (!(ninf <= 1e6 * guard_ref) || !all_finite(next.n) || !all_finite(next.w))
    throw BlowupError("possible blow-up: density out of bounds at t=" +
                          std::to_string(next.t),
                      next.t, ninf);
  return next;
}

inline double blowup_guard_reference(const State& s0, const SimParams& params) {
  return linf(s0.n) + std::abs(params.r) / params.mu + 1.0;
}

}  // namespace chemflow
