#pragma once

#include <array>

#include "chemflow/grid.hpp"
#include "chemflow/operators.hpp"
#include "chemflow/solver.hpp"

namespace chemflow {

struct FluidConfig {
  bool include_convection = true;  // Navier-Stokes if set, Stokes otherwise
  double poisson_tol = 1e-10;      // relative residual for pressure solves
  int poisson_max_iter = 0;        // 0 -> 10*nx*ny

  void validate() const {
    if (!(poisson_tol > 0.0) || poisson_tol > 1e-6)
      throw ConfigError("fluid: poisson_tol must lie in (0, 1e-6]");
  }
};

struct Projection {
  VectorField u;  // divergence-free part
  ScalarField q;  // potential: u = v - grad q, laplacian q = div v
  IterSolve info;
};

// Discrete Helmholtz projection: removes the gradient part of v so the
// cell divergence drops below poisson_tol relative to the input divergence.
inline Projection project(const VectorField& v, double tol, int max_iter,
                          const ScalarField* q_warm = nullptr) {
  const Grid& g = v.grid;
  Projection out{VectorField(g), ScalarField(g, BcType::neumann), {}};
  if (q_warm != nullptr && q_warm->grid.same_as(g)) out.q.values = q_warm->values;
  const ScalarField div_v = divergence(v);
  out.info = solve_poisson_neumann(g, div_v.values, out.q.values, tol, max_iter);
  const VectorField gq = gradient(out.q);
  out.u = v;
  for (size_t k = 0; k < out.u.u1.size(); ++k) out.u.u1[k] -= gq.u1[k];
  for (size_t k = 0; k < out.u.u2.size(); ++k) out.u.u2[k] -= gq.u2[k];
  out.u.enforce_no_slip();
  return out;
}

namespace detail {

// Upwind (u . grad)u for one step, evaluated on interior faces.
inline void convection_terms(const VectorField& u, std::vector<double>& c1,
                             std::vector<double>& c2) {
  const Grid& g = u.grid;
  c1.assign(u.u1.size(), 0.0);
  c2.assign(u.u2.size(), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      const double uc = u.u1_at(i, j);
      const double dxm = (u.u1_at(i, j) - u.u1_at(i - 1, j)) / g.dx;
      const double dxp = (u.u1_at(i + 1, j) - u.u1_at(i, j)) / g.dx;
      const double vc = 0.25 * (u.u2_at(i - 1, j) + u.u2_at(i, j) +
                                u.u2_at(i - 1, j + 1) + u.u2_at(i, j + 1));
      const double ys = (j > 0) ? u.u1_at(i, j - 1) : -u.u1_at(i, j);
      const double yn = (j + 1 < g.ny) ? u.u1_at(i, j + 1) : -u.u1_at(i, j);
      const double dym = (u.u1_at(i, j) - ys) / g.dy;
      const double dyp = (yn - u.u1_at(i, j)) / g.dy;
      c1[static_cast<size_t>(i + (g.nx + 1) * j)] =
          uc * (uc >= 0.0 ? dxm : dxp) + vc * (vc >= 0.0 ? dym : dyp);
    }
  }
  for (int j = 1; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double vc = u.u2_at(i, j);
      const double dym = (u.u2_at(i, j) - u.u2_at(i, j - 1)) / g.dy;
      const double dyp = (u.u2_at(i, j + 1) - u.u2_at(i, j)) / g.dy;
      const double uc = 0.25 * (u.u1_at(i, j - 1) + u.u1_at(i + 1, j - 1) +
                                u.u1_at(i, j) + u.u1_at(i + 1, j));
      const double xw = (i > 0) ? u.u2_at(i - 1, j) : -u.u2_at(i, j);
      const double xe = (i + 1 < g.nx) ? u.u2_at(i + 1, j) : -u.u2_at(i, j);
      const double dxm = (u.u2_at(i, j) - xw) / g.dx;
      const double dxp = (xe - u.u2_at(i, j)) / g.dx;
      c2[static_cast<size_t>(i + g.nx * j)] =
          vc * (vc >= 0.0 ? dym : dyp) + uc * (uc >= 0.0 ? dxm : dxp);
    }
  }
}

}  // namespace detail

struct FluidStep {
  VectorField u;
  ScalarField pressure;  // zero-mean, from the projection potential / dt
  IterSolve poisson_info;
};

// One IMEX fluid step: explicit convection (optional), implicit
// unit-viscosity diffusion, explicit buoyancy n*g, then projection.
// Buoyancy is added after the viscous solve so a pure-gradient force
// (e.g. uniform density under constant gravity) reaches the projection
// unfiltered and is removed exactly. gravity is the constant grad(phi).
inline FluidStep step_fluid(const VectorField& u, const ScalarField& n,
                            const std::array<double, 2>& gravity, double dt,
                            const FluidConfig& cfg,
                            const ScalarField* pressure_warm = nullptr) {
  require_same_grid(u.grid, n.grid, "step_fluid");
  const Grid& g = u.grid;
  VectorField star = u;

  if (cfg.include_convection) {
    std::vector<double> c1, c2;
    detail::convection_terms(u, c1, c2);
    for (size_t k = 0; k < star.u1.size(); ++k) star.u1[k] -= dt * c1[k];
    for (size_t k = 0; k < star.u2.size(); ++k) star.u2[k] -= dt * c2[k];
    star.enforce_no_slip();
  }

  VectorField visc = star;  // warm start from the predictor
  solve_helmholtz_velocity(g, 1, star.u1, visc.u1, dt, cfg.poisson_tol,
                           cfg.poisson_max_iter);
  solve_helmholtz_velocity(g, 2, star.u2, visc.u2, dt, cfg.poisson_tol,
                           cfg.poisson_max_iter);

  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      visc.u1_at(i, j) += dt * gravity[0] * 0.5 * (n.at(i - 1, j) + n.at(i, j));
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      visc.u2_at(i, j) += dt * gravity[1] * 0.5 * (n.at(i, j - 1) + n.at(i, j));
  visc.enforce_no_slip();

  ScalarField q_warm(g, BcType::neumann);
  if (pressure_warm != nullptr && pressure_warm->grid.same_as(g)) {
    q_warm.values = pressure_warm->values;
    for (double& v : q_warm.values) v *= dt;
  }
  Projection proj = project(visc, cfg.poisson_tol, cfg.poisson_max_iter, &q_warm);

  FluidStep out{std::move(proj.u), std::move(proj.q), proj.info};
  for (double& v : out.pressure.values) v /= dt;
  return out;
}

// (integral |u|^2, integral |grad u|^2) by midpoint-style quadrature on the
// staggered layout; wall-adjacent tangential derivatives use negated ghosts.
inline std::array<double, 2> fluid_energy_diagnostics(const VectorField& u) {
  const Grid& g = u.grid;
  const double da = g.cell_area();
  double ke = 0.0;
  for (double x : u.u1) ke += x * x;
  for (double x : u.u2) ke += x * x;
  ke *= da;

  // d(u1)/dx at cell centers, d(u1)/dy at horizontal edges (ghost-closed),
  // mirrored for u2; each sample weighted by one cell area.
  double grad = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (u.u1_at(i + 1, j) - u.u1_at(i, j)) / g.dx;
      grad += d * d;
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const double above = (j < g.ny) ? u.u1_at(i, j) : -u.u1_at(i, j - 1);
      const double below = (j > 0) ? u.u1_at(i, j - 1) : -u.u1_at(i, j);
      const double d = (above - below) / g.dy;
      grad += d * d;
    }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (u.u2_at(i, j + 1) - u.u2_at(i, j)) / g.dy;
      grad += d * d;
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const double right = (i < g.nx) ? u.u2_at(i, j) : -u.u2_at(i - 1, j);
      const double left = (i > 0) ? u.u2_at(i - 1, j) : -u.u2_at(i, j);
      const double d = (right - left) / g.dx;
      grad += d * d;
    }
  grad *= da;
  return {ke, grad};
}

inline double kinetic_energy(const VectorField& u) {
  return fluid_energy_diagnostics(u)[0];
}

}  // namespace chemflow
