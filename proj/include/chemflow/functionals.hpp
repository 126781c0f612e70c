#pragma once

#include <cmath>
#include <numbers>

#include "chemflow/chemo.hpp"
#include "chemflow/grid.hpp"
#include "chemflow/operators.hpp"

namespace chemflow {

// H(s) = s ln(mu s / (e r)) + r/mu, the entropy-like density of the
// positive-growth energy functional. Defined by continuity at s = 0
// (s ln s -> 0); nonnegative, convex, vanishing exactly at s = r/mu.
inline double entropy_h(double s, double r, double mu) {
  if (!(r > 0.0))
    throw std::domain_error("entropy_h: requires r > 0 (use the shifted functional otherwise)");
  if (!(mu > 0.0)) throw std::domain_error("entropy_h: requires mu > 0");
  if (s < 0.0) throw std::domain_error("entropy_h: requires s >= 0");
  if (s == 0.0) return r / mu;
  return s * std::log(mu * s / (std::numbers::e * r)) + r / mu;
}

// x ln x with the continuous extension 0 at x = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

enum class EnergyRegime { positive_r, nonpositive_r };

struct EnergyReport {
  EnergyRegime regime = EnergyRegime::positive_r;
  double f_value = 0.0;     // full functional
  double h_integral = 0.0;  // entropy part (regime-dependent integrand)
  double grad_w_sq = 0.0;   // integral of |grad w|^2
  double a = 0.0;           // shift parameter (nonpositive_r only)
  double t = 0.0;
};

// Discrete Dirichlet energy of w, consistent with the face gradients used
// by the chemotaxis flux and the w-equation sink.
inline double dirichlet_energy(const ScalarField& w) {
  return integrate(grad_sq_cells(w));
}

// F(n,w): for r > 0 the integral of H(n) plus (chi/2) integral |grad w|^2;
// for r <= 0 the shifted entropy integral of n(ln n + a) plus the same
// gradient term.
inline EnergyReport energy(const State& s, const SimParams& params, double a) {
  EnergyReport rep;
  rep.t = s.t;
  rep.grad_w_sq = dirichlet_energy(s.w);
  const double da = s.n.grid.cell_area();
  if (params.r > 0.0) {
    rep.regime = EnergyRegime::positive_r;
    double acc = 0.0;
    for (double v : s.n.values) acc += entropy_h(v, params.r, params.mu);
    rep.h_integral = acc * da;
  } else {
    rep.regime = EnergyRegime::nonpositive_r;
    rep.a = a;
    double acc = 0.0;
    for (double v : s.n.values) acc += xlogx(v) + a * v;
    rep.h_integral = acc * da;
  }
  rep.f_value = rep.h_integral + 0.5 * params.chi * rep.grad_w_sq;
  return rep;
}

// Spectral constants of the rectangle and the mass-derived time shift.
struct DerivedConstants {
  double gamma = 0.0;         // |Omega| / (mu * integral n0)
  double lambda1 = 0.0;       // first nonzero Neumann eigenvalue of -laplacian
  double cp_dirichlet = 0.0;  // first Dirichlet eigenvalue (Poincare constant for u)
  double mass0 = 0.0;
};

inline DerivedConstants derived_constants(const SimParams& params, double mass0) {
  const double pi = std::numbers::pi;
  DerivedConstants c;
  c.mass0 = mass0;
  if (!(mass0 > 0.0))
    throw std::domain_error("derived_constants: initial mass must be positive");
  c.gamma = params.grid.area() / (params.mu * mass0);
  const double kx = pi / params.grid.lx, ky = pi / params.grid.ly;
  c.lambda1 = std::min(kx * kx, ky * ky);
  c.cp_dirichlet = kx * kx + ky * ky;
  return c;
}

// One sample of the norms tracked against the convergence claims. All
// quadrature is midpoint over cells; gradient norms come from the shared
// cell-centered |grad w|^2.
struct FieldNorms {
  double mass = 0.0;
  double l2_n = 0.0;
  double linf_n = 0.0;
  double dev_inf = 0.0;  // ||n - r_+/mu||_inf
  double grad_w_l2 = 0.0;
  double grad_w_l6 = 0.0;
  double grad_w_linf = 0.0;
  double u_l2 = 0.0;
  double u_linf = 0.0;
  double c_min = 0.0;
  double c_max = 0.0;
};

inline FieldNorms norms(const State& s, const SimParams& params) {
  FieldNorms out;
  const double da = s.n.grid.cell_area();
  out.mass = integrate(s.n);
  out.l2_n = l2_norm(s.n);
  out.linf_n = linf(s.n);
  const double target = std::max(params.r, 0.0) / params.mu;
  double dev = 0.0;
  for (double v : s.n.values) dev = std::max(dev, std::abs(v - target));
  out.dev_inf = dev;

  const ScalarField gw2 = grad_sq_cells(s.w);
  double s2 = 0.0, s6 = 0.0, m2 = 0.0;
  for (double v : gw2.values) {
    s2 += v;
    s6 += v * v * v;
    m2 = std::max(m2, v);
  }
  out.grad_w_l2 = std::sqrt(s2 * da);
  out.grad_w_l6 = std::pow(s6 * da, 1.0 / 6.0);
  out.grad_w_linf = std::sqrt(m2);

  out.u_l2 = std::sqrt(fluid_energy_diagnostics(s.u)[0]);
  out.u_linf = linf(s.u);

  double wmin = s.w.values.empty() ? 0.0 : s.w.values[0];
  double wmax = wmin;
  for (double v : s.w.values) {
    wmin = std::min(wmin, v);
    wmax = std::max(wmax, v);
  }
  out.c_max = s.c0_max * std::exp(-wmin);
  out.c_min = s.c0_max * std::exp(-wmax);
  return out;
}

}  // namespace chemflow
