#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "chemflow/functionals.hpp"

namespace chemflow {

struct TimeSample {
  double t = 0.0;
  double value = 0.0;
};

enum class DecayModel { exponential, algebraic };

struct DecayFit {
  DecayModel model = DecayModel::exponential;
  double rate = 0.0;       // alpha for exponential, exponent p for algebraic
  double amplitude = 0.0;  // A in A e^{-alpha t} or A (t+1)^{-p}
  double r_squared = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  int samples = 0;
};

struct BoundCheck {
  std::string name;
  double satisfied_fraction = 0.0;  // fraction of sampled times obeying the bound
  double worst_violation = 0.0;     // max relative violation over samples
  double slack = 0.0;               // allowed relative slack
  bool pass() const { return worst_violation <= slack; }
};

// Closed-form solution of y' = y (r - mu y). Covers r = 0 as the limit
// y0 / (1 + mu y0 t).
inline double logistic_solution(double n0, double r, double mu, double t) {
  if (n0 < 0.0) throw std::domain_error("logistic_solution: n0 must be >= 0");
  if (!(mu > 0.0)) throw std::domain_error("logistic_solution: mu must be > 0");
  if (n0 == 0.0) return 0.0;
  if (r == 0.0) return n0 / (1.0 + mu * n0 * t);
  const double e = std::exp(r * t);
  return n0 * e / (1.0 + mu * n0 * (e - 1.0) / r);
}

// |Omega| / (mu (t + gamma)), the population-mass envelope for r <= 0;
// tight at t = 0 by the definition of gamma.
inline double l1_decay_bound(const DerivedConstants& consts, double area,
                             double mu, double t) {
  return area / (mu * (t + consts.gamma));
}

// Right-hand side of the comparison estimate for y' + a y <= h with
// unit-window integrals of h bounded by b.
inline double ode_comparison_bound(double y0, double a, double b, double t,
                                   double t0) {
  if (!(a > 0.0)) throw std::domain_error("ode_comparison_bound: a must be > 0");
  if (b < 0.0 || y0 < 0.0 || t < t0)
    throw std::domain_error("ode_comparison_bound: invalid arguments");
  return std::exp(-a * (t - t0)) * y0 + b / (1.0 - std::exp(-a));
}

// Log-space least squares: (t, ln v) for the exponential model,
// (ln(t+1), ln v) for the algebraic model. Zero-variance residuals count
// as a perfect fit (r^2 = 1).
inline DecayFit fit_decay(const std::vector<TimeSample>& series,
                          DecayModel model, double window_start,
                          double window_end) {
  DecayFit fit;
  fit.model = model;
  fit.window_start = window_start;
  fit.window_end = window_end;

  std::vector<double> xs, ys;
  for (const TimeSample& s : series) {
    if (s.t < window_start || s.t > window_end) continue;
    if (!(s.value > 0.0))
      throw std::domain_error(
          "fit_decay: nonpositive value in window (series hit floor; shrink the window)");
    xs.push_back(model == DecayModel::exponential ? s.t : std::log(s.t + 1.0));
    ys.push_back(std::log(s.value));
  }
  fit.samples = static_cast<int>(xs.size());
  if (fit.samples < 10)
    throw std::domain_error("fit_decay: need at least 10 samples in the window");

  const double num = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (size_t k = 0; k < xs.size(); ++k) {
    sx += xs[k];
    sy += ys[k];
  }
  const double mx = sx / num, my = sy / num;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx, dy = ys[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = my - slope * mx;
  fit.rate = -slope;
  fit.amplitude = std::exp(intercept);
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (size_t k = 0; k < xs.size(); ++k) {
      const double e = ys[k] - (intercept + slope * xs[k]);
      ss_res += e * e;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  } else {
    fit.r_squared = 1.0;  // constant series: residuals are identically zero
  }
  return fit;
}

// Two-sided algebraic sandwich: v(t) sits between positive multiples of
// 1/(t+1) iff m(t) = v(t)(t+1) has bounded ratio over the window.
inline BoundCheck two_sided_algebraic_check(const std::vector<TimeSample>& series,
                                            double window_start,
                                            double window_end,
                                            double ratio_cap = 25.0,
                                            const std::string& name = "algebraic_sandwich") {
  BoundCheck check;
  check.name = name;
  check.slack = 0.0;
  double m_min = 0.0, m_max = 0.0;
  int count = 0;
  for (const TimeSample& s : series) {
    if (s.t < window_start || s.t > window_end) continue;
    const double m = s.value * (s.t + 1.0);
    if (count == 0) {
      m_min = m_max = m;
    } else {
      m_min = std::min(m_min, m);
      m_max = std::max(m_max, m);
    }
    ++count;
  }
  if (count == 0)
    throw std::domain_error("two_sided_algebraic_check: empty window");
  if (!(m_min > 0.0)) {
    check.worst_violation = std::numeric_limits<double>::infinity();
    check.satisfied_fraction = 0.0;
    return check;
  }
  const double ratio = m_max / m_min;
  check.worst_violation = std::max(0.0, ratio / ratio_cap - 1.0);
  // fraction of samples within the cap of the window minimum
  int ok = 0;
  for (const TimeSample& s : series) {
    if (s.t < window_start || s.t > window_end) continue;
    const double m = s.value * (s.t + 1.0);
    if (m > 0.0 && m / m_min <= ratio_cap) ++ok;
  }
  check.satisfied_fraction = static_cast<double>(ok) / count;
  return check;
}

}  // namespace chemflow
