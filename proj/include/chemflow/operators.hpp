#pragma once

#include <atomic>

#include "chemflow/grid.hpp"

namespace chemflow {

namespace testhooks {
// Flips the sign of the east-face flux in laplacian(). Only ever set by the
// self-test mutation canary to confirm the convergence criterion can fail.
inline std::atomic<bool> flip_laplacian_sign{false};
}  // namespace testhooks

// 5-point Laplacian with single-layer ghost cells implied by the bc tag:
// mirror (zero face flux) for Neumann, negation (zero face value) for
// Dirichlet.
inline ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g, f.bc);
  const double ix2 = 1.0 / (g.dx * g.dx);
  const double iy2 = 1.0 / (g.dy * g.dy);
  const bool neumann = (f.bc == BcType::neumann);
  const double east_sign = testhooks::flip_laplacian_sign.load() ? -1.0 : 1.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double c = f.at(i, j);
      // face fluxes (difference toward neighbor); wall fluxes follow the tag
      double fe = (i + 1 < g.nx) ? (f.at(i + 1, j) - c) : (neumann ? 0.0 : -2.0 * c);
      double fw = (i > 0) ? (c - f.at(i - 1, j)) : (neumann ? 0.0 : 2.0 * c);
      double fn = (j + 1 < g.ny) ? (f.at(i, j + 1) - c) : (neumann ? 0.0 : -2.0 * c);
      double fs = (j > 0) ? (c - f.at(i, j - 1)) : (neumann ? 0.0 : 2.0 * c);
      out.at(i, j) = (east_sign * fe - fw) * ix2 + (fn - fs) * iy2;
    }
  }
  return out;
}

// Face-centered gradient. Boundary faces carry the one-sided ghost closure:
// zero for Neumann, 2*f/dx for Dirichlet, which makes divergence(gradient(f))
// coincide with laplacian(f) on every cell.
inline VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid;
  VectorField out(g);
  const bool neumann = (f.bc == BcType::neumann);
  for (int j = 0; j < g.ny; ++j) {
    out.u1_at(0, j) = neumann ? 0.0 : 2.0 * f.at(0, j) / g.dx;
    for (int i = 1; i < g.nx; ++i)
      out.u1_at(i, j) = (f.at(i, j) - f.at(i - 1, j)) / g.dx;
    out.u1_at(g.nx, j) = neumann ? 0.0 : -2.0 * f.at(g.nx - 1, j) / g.dx;
  }
  for (int i = 0; i < g.nx; ++i) {
    out.u2_at(i, 0) = neumann ? 0.0 : 2.0 * f.at(i, 0) / g.dy;
    for (int j = 1; j < g.ny; ++j)
      out.u2_at(i, j) = (f.at(i, j) - f.at(i, j - 1)) / g.dy;
    out.u2_at(i, g.ny) = neumann ? 0.0 : -2.0 * f.at(i, g.ny - 1) / g.dy;
  }
  return out;
}

// Cell-centered divergence of a face field; discrete adjoint of gradient.
inline ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid;
  ScalarField out(g, BcType::neumann);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.at(i, j) = (v.u1_at(i + 1, j) - v.u1_at(i, j)) / g.dx +
                     (v.u2_at(i, j + 1) - v.u2_at(i, j)) / g.dy;
  return out;
}

// Flux-form advection term div(v f) with first-order upwinding by face
// velocity sign. Equals v . grad f for discretely divergence-free v; the
// flux form keeps cell sums telescoping (exact conservation with no-slip
// walls).
inline ScalarField advect(const ScalarField& f, const VectorField& v) {
  require_same_grid(f.grid, v.grid, "advect");
  const Grid& g = f.grid;
  ScalarField out(g, f.bc);
  std::vector<double> fx(static_cast<size_t>((g.nx + 1) * g.ny), 0.0);
  std::vector<double> fy(static_cast<size_t>(g.nx * (g.ny + 1)), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      const double vel = v.u1_at(i, j);
      const double fup = vel >= 0.0 ? f.at(i - 1, j) : f.at(i, j);
      fx[static_cast<size_t>(i + (g.nx + 1) * j)] = vel * fup;
    }
  }
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 1; j < g.ny; ++j) {
      const double vel = v.u2_at(i, j);
      const double fup = vel >= 0.0 ? f.at(i, j - 1) : f.at(i, j);
      fy[static_cast<size_t>(i + g.nx * j)] = vel * fup;
    }
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.at(i, j) = (fx[static_cast<size_t>(i + 1 + (g.nx + 1) * j)] -
                      fx[static_cast<size_t>(i + (g.nx + 1) * j)]) / g.dx +
                     (fy[static_cast<size_t>(i + g.nx * (j + 1))] -
                      fy[static_cast<size_t>(i + g.nx * j)]) / g.dy;
  return out;
}

// chi * div(n grad w), flux form. Face density is upwinded against the drift
// velocity -chi grad w (cells migrate down the w gradient), which keeps the
// term from feeding anti-diffusive overshoots. Wall faces carry no flux
// (Neumann), so the cell sum telescopes to zero.
inline ScalarField chemotaxis_flux_div(const ScalarField& n,
                                       const ScalarField& w, double chi) {
  require_same_grid(n.grid, w.grid, "chemotaxis_flux_div");
  for (double x : n.values)
    if (x < 0.0)
      throw std::domain_error("chemotaxis_flux_div: density has negative entries");
  const Grid& g = n.grid;
  ScalarField out(g, BcType::neumann);
  std::vector<double> fx(static_cast<size_t>((g.nx + 1) * g.ny), 0.0);
  std::vector<double> fy(static_cast<size_t>(g.nx * (g.ny + 1)), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      const double gw = (w.at(i, j) - w.at(i - 1, j)) / g.dx;
      // drift = -chi*gw: positive drift carries the left cell
      const double nf = gw <= 0.0 ? n.at(i - 1, j) : n.at(i, j);
      fx[static_cast<size_t>(i + (g.nx + 1) * j)] = nf * gw;
    }
  }
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 1; j < g.ny; ++j) {
      const double gw = (w.at(i, j) - w.at(i, j - 1)) / g.dy;
      const double nf = gw <= 0.0 ? n.at(i, j - 1) : n.at(i, j);
      fy[static_cast<size_t>(i + g.nx * j)] = nf * gw;
    }
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.at(i, j) =
          chi * ((fx[static_cast<size_t>(i + 1 + (g.nx + 1) * j)] -
                  fx[static_cast<size_t>(i + (g.nx + 1) * j)]) / g.dx +
                 (fy[static_cast<size_t>(i + g.nx * (j + 1))] -
                  fy[static_cast<size_t>(i + g.nx * j)]) / g.dy);
  return out;
}

// Cell-centered |grad w|^2 as the average of squared face gradients, the
// same face gradients the chemotaxis flux uses. Summing this field times
// cell area gives the discrete Dirichlet energy.
inline ScalarField grad_sq_cells(const ScalarField& w) {
  const Grid& g = w.grid;
  const VectorField gw = gradient(w);
  ScalarField out(g, BcType::neumann);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double gx0 = gw.u1_at(i, j), gx1 = gw.u1_at(i + 1, j);
      const double gy0 = gw.u2_at(i, j), gy1 = gw.u2_at(i, j + 1);
      out.at(i, j) = 0.5 * (gx0 * gx0 + gx1 * gx1) + 0.5 * (gy0 * gy0 + gy1 * gy1);
    }
  }
  return out;
}

}  // namespace chemflow
