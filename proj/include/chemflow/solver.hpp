#pragma once

#include <cmath>
#include <vector>

#include "chemflow/errors.hpp"
#include "chemflow/grid.hpp"

namespace chemflow {

struct IterSolve {
  int iterations = 0;
  double rel_residual = 0.0;  // final ||r||_2 / ||b||_2
  bool converged = true;
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline void subtract_mean(std::vector<double>& v) {
  const double m = sum(v) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

// Jacobi-preconditioned conjugate gradients. Converged when the residual is
// below tol relative to b in the 2-norm and, if linf_too is set, in the
// max-norm as well (the projection contract is stated in max-norms). The
// recurrence residual is re-verified against the true residual before
// accepting convergence.
template <class Apply>
IterSolve pcg(Apply&& apply, const std::vector<double>& b,
              std::vector<double>& x, const std::vector<double>& inv_diag,
              double tol, int max_iter, bool linf_too, bool mean_free) {
  const size_t n = b.size();
  IterSolve info;
  const double b2 = std::sqrt(dot(b, b));
  const double binf = max_abs(b);
  if (b2 == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return info;
  }
  std::vector<double> r(n), z(n), p(n), ap(n);

  apply(x, ap);
  for (size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
  if (mean_free) subtract_mean(r);

  auto small_enough = [&](const std::vector<double>& res) {
    const double r2 = std::sqrt(dot(res, res));
    info.rel_residual = r2 / b2;
    if (r2 > tol * b2) return false;
    return !linf_too || max_abs(res) <= tol * binf;
  };

  if (small_enough(r)) return info;

  for (size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
  p = z;
  double rz = dot(r, z);

  for (int it = 1; it <= max_iter; ++it) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) break;  // kernel direction or breakdown; verify below
    const double alpha = rz / pap;
    for (size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    info.iterations = it;
    if (small_enough(r)) {
      // guard against recurrence drift: confirm with the true residual
      apply(x, ap);
      for (size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
      if (mean_free) subtract_mean(r);
      if (small_enough(r)) return info;
    }
    for (size_t k = 0; k < n; ++k) z[k] = inv_diag[k] * r[k];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  info.converged = small_enough(r);
  return info;
}

// -laplacian with Neumann (mirror) closure, SPD up to the constant kernel.
inline void apply_neg_laplacian_neumann(const Grid& g,
                                        const std::vector<double>& x,
                                        std::vector<double>& out) {
  const double ix2 = 1.0 / (g.dx * g.dx);
  const double iy2 = 1.0 / (g.dy * g.dy);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const size_t k = static_cast<size_t>(i + g.nx * j);
      const double c = x[k];
      double acc = 0.0;
      if (i + 1 < g.nx) acc += (x[k + 1] - c) * ix2;
      if (i > 0) acc += (x[k - 1] - c) * ix2;
      if (j + 1 < g.ny) acc += (x[k + static_cast<size_t>(g.nx)] - c) * iy2;
      if (j > 0) acc += (x[k - static_cast<size_t>(g.nx)] - c) * iy2;
      out[k] = -acc;
    }
  }
}

inline std::vector<double> inv_diag_poisson_neumann(const Grid& g, double shift) {
  // shift + (-laplacian) diagonal; shift = 0 gives the singular Poisson matrix
  std::vector<double> d(static_cast<size_t>(g.cells()));
  const double ix2 = 1.0 / (g.dx * g.dx);
  const double iy2 = 1.0 / (g.dy * g.dy);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const double cx = (i > 0 ? 1.0 : 0.0) + (i + 1 < g.nx ? 1.0 : 0.0);
      const double cy = (j > 0 ? 1.0 : 0.0) + (j + 1 < g.ny ? 1.0 : 0.0);
      d[static_cast<size_t>(i + g.nx * j)] = 1.0 / (shift + cx * ix2 + cy * iy2);
    }
  }
  return d;
}

}  // namespace detail

inline int default_poisson_max_iter(const Grid& g) { return 10 * g.nx * g.ny; }

// Solves laplacian(q) = rhs with homogeneous Neumann walls and zero-mean
// normalization; rhs is projected onto mean-free data for compatibility.
// q is warm-started from its incoming values.
inline IterSolve solve_poisson_neumann(const Grid& g, std::vector<double> rhs,
                                       std::vector<double>& q, double tol,
                                       int max_iter) {
  if (max_iter <= 0) max_iter = default_poisson_max_iter(g);
  detail::subtract_mean(rhs);
  for (double& v : rhs) v = -v;  // solve (-laplacian) q = -rhs, SPD form
  detail::subtract_mean(q);
  const std::vector<double> inv_diag = detail::inv_diag_poisson_neumann(g, 0.0);
  auto apply = [&g](const std::vector<double>& x, std::vector<double>& out) {
    detail::apply_neg_laplacian_neumann(g, x, out);
  };
  IterSolve info = detail::pcg(apply, rhs, q, inv_diag, tol, max_iter,
                               /*linf_too=*/true, /*mean_free=*/true);
  detail::subtract_mean(q);
  if (!info.converged)
    throw SolverError("pressure Poisson solve failed to converge",
                      info.rel_residual, info.iterations);
  return info;
}

// Solves (I - dt*laplacian) x = rhs with Neumann walls. The mean solves
// exactly (constants are eigenvectors with eigenvalue 1); CG only sees the
// fluctuation, so the solve tolerance scales with the fluctuation rather
// than the field magnitude.
inline IterSolve solve_helmholtz_neumann(const Grid& g,
                                         const std::vector<double>& rhs,
                                         std::vector<double>& x, double dt,
                                         double tol, int max_iter) {
  if (max_iter <= 0) max_iter = default_poisson_max_iter(g);
  const size_t n = rhs.size();
  const double mean = sum(rhs) / static_cast<double>(n);
  std::vector<double> b(n);
  for (size_t k = 0; k < n; ++k) b[k] = rhs[k] - mean;
  detail::subtract_mean(x);  // warm start with the incoming fluctuation part
  std::vector<double> inv_diag = detail::inv_diag_poisson_neumann(g, 0.0);
  for (double& v : inv_diag) v = 1.0 / (1.0 + dt / v);
  auto apply = [&g, dt](const std::vector<double>& y, std::vector<double>& out) {
    detail::apply_neg_laplacian_neumann(g, y, out);
    for (size_t k = 0; k < y.size(); ++k) out[k] = y[k] + dt * out[k];
  };
  IterSolve info = detail::pcg(apply, b, x, inv_diag, tol, max_iter,
                               /*linf_too=*/false, /*mean_free=*/true);
  for (double& v : x) v += mean;
  if (!info.converged)
    throw SolverError("implicit diffusion solve failed to converge",
                      info.rel_residual, info.iterations);
  return info;
}

namespace detail {

// (I - dt*laplacian) on one staggered velocity component with no-slip walls.
// Wall faces are pinned identity rows (their values and right-hand sides are
// zero throughout), tangential walls enter via negated ghosts.
template <int Comp>
inline void apply_helmholtz_velocity(const Grid& g, double dt,
                                     const std::vector<double>& x,
                                     std::vector<double>& out) {
  const double ix2 = 1.0 / (g.dx * g.dx);
  const double iy2 = 1.0 / (g.dy * g.dy);
  const int mx = (Comp == 1) ? g.nx + 1 : g.nx;
  const int my = (Comp == 1) ? g.ny : g.ny + 1;
  for (int j = 0; j < my; ++j) {
    for (int i = 0; i < mx; ++i) {
      const size_t k = static_cast<size_t>(i + mx * j);
      const bool pinned = (Comp == 1) ? (i == 0 || i == g.nx)
                                      : (j == 0 || j == g.ny);
      if (pinned) {
        out[k] = x[k];
        continue;
      }
      const double c = x[k];
      double lap = 0.0;
      if (Comp == 1) {
        lap += (x[k + 1] - 2.0 * c + x[k - 1]) * ix2;  // neighbors exist (pinned walls)
        const double yn = (j + 1 < my) ? x[k + static_cast<size_t>(mx)] : -c;
        const double ys = (j > 0) ? x[k - static_cast<size_t>(mx)] : -c;
        lap += (yn - 2.0 * c + ys) * iy2;
      } else {
        const double xe = (i + 1 < mx) ? x[k + 1] : -c;
        const double xw = (i > 0) ? x[k - 1] : -c;
        lap += (xe - 2.0 * c + xw) * ix2;
        lap += (x[k + static_cast<size_t>(mx)] - 2.0 * c +
                x[k - static_cast<size_t>(mx)]) * iy2;
      }
      out[k] = c - dt * lap;
    }
  }
}

template <int Comp>
inline std::vector<double> inv_diag_helmholtz_velocity(const Grid& g, double dt) {
  const double ix2 = 1.0 / (g.dx * g.dx);
  const double iy2 = 1.0 / (g.dy * g.dy);
  const int mx = (Comp == 1) ? g.nx + 1 : g.nx;
  const int my = (Comp == 1) ? g.ny : g.ny + 1;
  std::vector<double> d(static_cast<size_t>(mx * my));
  for (int j = 0; j < my; ++j) {
    for (int i = 0; i < mx; ++i) {
      const bool pinned = (Comp == 1) ? (i == 0 || i == g.nx)
                                      : (j == 0 || j == g.ny);
      double cx = 2.0, cy = 2.0;
      if (Comp == 1) {
        if (j == 0 || j + 1 == my) cy = 3.0;  // negated ghost
      } else {
        if (i == 0 || i + 1 == mx) cx = 3.0;
      }
      d[static_cast<size_t>(i + mx * j)] =
          pinned ? 1.0 : 1.0 / (1.0 + dt * (cx * ix2 + cy * iy2));
    }
  }
  return d;
}

}  // namespace detail

// Implicit viscous solve for one velocity component (comp = 1 or 2).
// rhs must be zero on wall faces; the result keeps them zero.
inline IterSolve solve_helmholtz_velocity(const Grid& g, int comp,
                                          const std::vector<double>& rhs,
                                          std::vector<double>& x, double dt,
                                          double tol, int max_iter) {
  if (max_iter <= 0) max_iter = default_poisson_max_iter(g);
  IterSolve info;
  if (comp == 1) {
    const std::vector<double> inv_diag =
        detail::inv_diag_helmholtz_velocity<1>(g, dt);
    auto apply = [&g, dt](const std::vector<double>& y, std::vector<double>& out) {
      detail::apply_helmholtz_velocity<1>(g, dt, y, out);
    };
    info = detail::pcg(apply, rhs, x, inv_diag, tol, max_iter, false, false);
  } else {
    const std::vector<double> inv_diag =
        detail::inv_diag_helmholtz_velocity<2>(g, dt);
    auto apply = [&g, dt](const std::vector<double>& y, std::vector<double>& out) {
      detail::apply_helmholtz_velocity<2>(g, dt, y, out);
    };
    info = detail::pcg(apply, rhs, x, inv_diag, tol, max_iter, false, false);
  }
  if (!info.converged)
    throw SolverError("implicit viscous solve failed to converge",
                      info.rel_residual, info.iterations);
  return info;
}

}  // namespace chemflow
