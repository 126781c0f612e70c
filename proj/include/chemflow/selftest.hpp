#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "chemflow/chemflow.hpp"

namespace chemflow {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;  // informational; not part of the canonical text
  double budget_seconds = 0.0;
};

struct SelftestOptions {
  std::vector<int> criteria;      // empty: run all ten
  bool corrupt_laplacian = false; // mutation canary for the operator criterion
  int jobs = 2;                   // concurrency for the mu sweep
};

struct SelftestReport {
  std::vector<CriterionResult> criteria;
  bool all_pass = true;

  // canonical report: deterministic for a fixed build and option set
  std::string text() const {
    std::string out;
    for (const CriterionResult& c : criteria) {
      out += c.pass ? "[PASS] " : "[FAIL] ";
      out += std::to_string(c.id);
      out += ' ';
      out += c.name;
      if (!c.detail.empty()) {
        out += ": ";
        out += c.detail;
      }
      out += '\n';
    }
    out += all_pass ? "all criteria passed\n" : "criteria FAILED\n";
    return out;
  }
};

namespace selftest_detail {

inline std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

struct Ctx {
  std::optional<RunResult> thm13;   // r = 0 scenario, criteria 5 and 8
  std::optional<RunResult> thm12;   // r > 0 scenario, criteria 6 and 7
  std::optional<State> logistic_final;
  std::optional<RunResult> logistic;

  RunConfig thm13_config() const {
    RunConfig cfg;
    cfg.grid_nx = cfg.grid_ny = 64;
    cfg.params.chi = 0.5;
    cfg.params.r = 0.0;
    cfg.params.mu = 1.0;
    cfg.params.gravity = {0.0, -1.0};
    cfg.params.t_end = 100.0;
    cfg.params.init.preset = "gauss-bump";
    // unit initial mass puts the L1 pole at gamma ~ 1, matching the
    // (t+1)^{-p} fit model over the measurement window
    cfg.params.init.n_amp = 16.0;
    cfg.output_every = 0.5;
    cfg.check_window_start = 10.0;
    cfg.check_window_end = 100.0;
    cfg.checks = {"positivity", "clamped_mass", "cmax_monotone", "l1_decay",
                  "n_inf_sandwich", "gradw_inf_tbound", "gradw_l2_to_zero"};
    return cfg;
  }

  RunConfig thm12_config() const {
    // 4x4 box: lambda_1 = (pi/4)^2 ~ 0.62 is comparable to r, so the
    // gradient and velocity tails stay above round-off through the fit
    // window (on a unit square they fall below double precision before
    // the burn-in time).
    RunConfig cfg;
    cfg.grid_nx = cfg.grid_ny = 64;
    cfg.grid_lx = cfg.grid_ly = 4.0;
    cfg.params.chi = 0.5;
    cfg.params.r = 1.0;
    cfg.params.mu = 20.0;
    cfg.params.gravity = {0.0, -1.0};
    cfg.params.t_end = 30.0;
    cfg.params.init.preset = "vortex-fluid";
    cfg.params.init.u_amp = 0.5;
    cfg.output_every = 0.1;
    cfg.check_window_start = 10.0;
    cfg.check_window_end = 30.0;
    cfg.checks = {"positivity", "clamped_mass", "cmax_monotone",
                  "energy_monotone"};
    return cfg;
  }

  const RunResult& get_thm13() {
    if (!thm13) thm13 = run(thm13_config());
    return *thm13;
  }
  const RunResult& get_thm12() {
    if (!thm12) thm12 = run(thm12_config());
    return *thm12;
  }
};

// criterion 1: manufactured-solution convergence of the stencil operators
inline CriterionResult operator_convergence() {
  CriterionResult c{1, "operator-convergence", false, "", 0.0, 10.0};
  constexpr double pi = std::numbers::pi;
  auto errors = [&](int n) {
    const Grid g = Grid::make(n, n, 1.0, 1.0);
    ScalarField f(g, BcType::neumann);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        f.at(i, j) = std::cos(pi * g.xc(i)) * std::cos(pi * g.yc(j));
    const ScalarField lap = laplacian(f);
    double le = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        le = std::max(le, std::abs(lap.at(i, j) + 2.0 * pi * pi * f.at(i, j)));
    const VectorField grad = gradient(f);
    double ge = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i)
        ge = std::max(ge, std::abs(grad.u1_at(i, j) +
                                   pi * std::sin(pi * g.xf(i)) * std::cos(pi * g.yc(j))));
    VectorField v(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i)
        v.u1_at(i, j) = std::sin(pi * g.xf(i)) * std::cos(pi * g.yc(j));
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        v.u2_at(i, j) = std::cos(pi * g.xc(i)) * std::sin(pi * g.yf(j));
    const ScalarField div = divergence(v);
    double de = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        de = std::max(de, std::abs(div.at(i, j) - 2.0 * pi * std::cos(pi * g.xc(i)) *
                                                      std::cos(pi * g.yc(j))));
    return std::array<double, 3>{le, ge, de};
  };
  const auto e32 = errors(32), e64 = errors(64), e128 = errors(128);
  double min_order = 1e9;
  for (int k = 0; k < 3; ++k) {
    min_order = std::min(min_order, std::log2(e32[k] / e64[k]));
    min_order = std::min(min_order, std::log2(e64[k] / e128[k]));
  }
  c.pass = min_order >= 1.9;
  c.detail = fmt("min empirical order %.3f (need >= 1.9)", min_order);
  return c;
}

// criterion 2: projection kills the divergence of a random field
inline CriterionResult projection_exactness() {
  CriterionResult c{2, "projection-exactness", false, "", 0.0, 5.0};
  const Grid g = Grid::make(64, 64, 1.0, 1.0);
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorField v(g);
  for (double& x : v.u1) x = dist(rng);
  for (double& x : v.u2) x = dist(rng);
  v.enforce_no_slip();
  const double div_in = linf(divergence(v));
  const Projection p = project(v, 1e-10, 0);
  const double ratio = linf(divergence(p.u)) / div_in;
  c.pass = ratio <= 1e-10;
  c.detail = fmt("||div Pu||/||div u|| = %.3e (need <= 1e-10)", ratio);
  return c;
}

// criterion 3: spatially uniform data follows the closed-form logistic ODE
inline CriterionResult logistic_oracle(Ctx& ctx) {
  CriterionResult c{3, "logistic-oracle", false, "", 0.0, 10.0};
  RunConfig cfg;
  cfg.grid_nx = cfg.grid_ny = 16;
  cfg.params.chi = 0.5;
  cfg.params.r = 1.0;
  cfg.params.mu = 1.0;
  cfg.params.gravity = {0.0, 0.0};
  cfg.params.t_end = 1.0;
  cfg.params.dt_max = 1e-3;
  cfg.params.init.preset = "uniform";
  cfg.params.init.n_amp = 0.5;
  cfg.output_every = 0.1;
  cfg.checks = {"positivity", "clamped_mass", "cmax_monotone"};
  ctx.logistic = run(cfg);
  const RunResult& res = *ctx.logistic;
  const double mean = res.rows.back().mass / (cfg.grid_lx * cfg.grid_ly);
  const double oracle = logistic_solution(0.5, 1.0, 1.0, 1.0);
  const double err = std::abs(mean - oracle);
  // uniformity: the max deviation from the mean stays at round-off
  const double spread = std::abs(res.rows.back().linf_n - mean);
  c.pass = err <= 1e-3 && spread <= 1e-12;
  c.detail = fmt("|mean - logistic| = %.3e (<= 1e-3), spread = %.3e (<= 1e-12)",
                 err, spread);
  return c;
}

inline bool run_checks_pass(const RunResult& res, std::string& detail,
                            std::initializer_list<const char*> names) {
  bool ok = true;
  for (const char* name : names) {
    for (const BoundCheck& ch : res.checks) {
      if (ch.name != name) continue;
      if (!ch.pass()) {
        ok = false;
        detail += fmt("%s violated by %.3e; ", name, ch.worst_violation);
      }
    }
  }
  return ok;
}

// criterion 4: positivity and the signal maximum principle on every run
inline CriterionResult positivity_all_runs(Ctx& ctx) {
  CriterionResult c{4, "positivity-max-principle", false, "", 0.0, 0.0};
  std::string detail;
  bool ok = true;
  int runs = 0;
  auto inspect = [&](const RunResult& res, const char* label) {
    ++runs;
    std::string local;
    if (!run_checks_pass(res, local, {"positivity", "clamped_mass", "cmax_monotone"})) {
      ok = false;
      detail += fmt("[%s] %s", label, local.c_str());
    }
    for (const DiagnosticsRow& r : res.rows)
      if (!(r.c_min > 0.0)) {
        ok = false;
        detail += fmt("[%s] c_min <= 0 at t=%.3f; ", label, r.t);
        break;
      }
  };
  if (ctx.logistic) inspect(*ctx.logistic, "logistic");
  inspect(ctx.get_thm13(), "thm13");
  inspect(ctx.get_thm12(), "thm12");
  c.pass = ok;
  c.detail = ok ? fmt("n, w >= 0, c_max monotone, c_min > 0, clamp budget held on %d runs", runs)
                : detail;
  return c;
}

// criterion 5: L1 decay envelope on the r = 0 scenario
inline CriterionResult l1_decay(Ctx& ctx) {
  CriterionResult c{5, "l1-decay-bound", false, "", 0.0, 120.0};
  const RunResult& res = ctx.get_thm13();
  for (const BoundCheck& ch : res.checks)
    if (ch.name == "l1_decay") {
      c.pass = ch.pass();
      c.detail = fmt("worst mass/bound excess %.3e (slack 5e-2)", ch.worst_violation);
    }
  return c;
}

// criterion 6: exponential convergence rates in the r > 0 scenario
inline CriterionResult exponential_rates(Ctx& ctx) {
  CriterionResult c{6, "exponential-decay-rates", false, "", 0.0, 180.0};
  const RunResult& res = ctx.get_thm12();
  const double dev_final = res.rows.back().dev_inf;
  const DecayFit dev_fit = fit_decay_shrink(column_series(res.rows, "dev_inf"),
                                            DecayModel::exponential, 10.0, 30.0);
  const DecayFit gw6_fit = fit_decay_shrink(column_series(res.rows, "grad_w_l6"),
                                            DecayModel::exponential, 10.0, 30.0);
  const DecayFit u_fit = fit_decay_shrink(column_series(res.rows, "u_linf"),
                                          DecayModel::exponential, 10.0, 30.0);
  c.pass = dev_final <= 1e-3 && dev_fit.rate > 0.05 && dev_fit.r_squared >= 0.95 &&
           gw6_fit.rate > 0.0 && u_fit.rate > 0.0;
  c.detail = fmt("dev_inf(30)=%.3e, alpha=%.3f (r2=%.4f), gw6 rate=%.3f, u rate=%.3f",
                 dev_final, dev_fit.rate, dev_fit.r_squared, gw6_fit.rate, u_fit.rate);
  return c;
}

// criterion 7: the energy functional is monotone after burn-in
inline CriterionResult energy_monotonicity(Ctx& ctx) {
  CriterionResult c{7, "energy-monotonicity", false, "", 0.0, 0.0};
  const RunResult& res = ctx.get_thm12();
  for (const BoundCheck& ch : res.checks)
    if (ch.name == "energy_monotone") {
      c.pass = ch.pass();
      c.detail = fmt("max per-step dF = %.3e (allow <= 1e-6)", ch.worst_violation);
    }
  return c;
}

// criterion 8: algebraic decay profile in the r = 0 scenario
inline CriterionResult algebraic_profile(Ctx& ctx) {
  CriterionResult c{8, "algebraic-decay-profile", false, "", 0.0, 180.0};
  const RunResult& res = ctx.get_thm13();
  const DecayFit n_fit = fit_decay_shrink(column_series(res.rows, "linf_n"),
                                          DecayModel::algebraic, 10.0, 100.0);
  const DecayFit c_fit = fit_decay_shrink(column_series(res.rows, "c_max"),
                                          DecayModel::algebraic, 10.0, 100.0);
  std::string detail;
  const bool sandwiches = run_checks_pass(res, detail,
                                          {"n_inf_sandwich", "gradw_inf_tbound",
                                           "gradw_l2_to_zero"});
  bool cmin_ok = true;
  for (const DiagnosticsRow& r : res.rows) cmin_ok = cmin_ok && r.c_min > 0.0;
  c.pass = n_fit.rate >= 0.75 && n_fit.rate <= 1.25 && n_fit.r_squared >= 0.9 &&
           sandwiches && c_fit.rate > 0.0 && cmin_ok;
  c.detail = fmt("n_inf exponent %.3f (r2=%.4f), c_max exponent %.3f%s%s",
                 n_fit.rate, n_fit.r_squared, c_fit.rate,
                 detail.empty() ? "" : "; ", detail.c_str());
  return c;
}

// criterion 9: the mu sweep stays bounded and stabilizes monotonically
inline CriterionResult mu_sweep_sanity(int jobs) {
  CriterionResult c{9, "mu-sweep-sanity", false, "", 0.0, 0.0};
  RunConfig base;
  base.grid_nx = base.grid_ny = 48;
  base.params.chi = 0.5;
  base.params.r = 1.0;
  base.params.gravity = {0.0, -1.0};
  base.params.t_end = 20.0;
  base.params.init.preset = "gauss-bump";
  base.output_every = 0.5;
  const std::vector<SweepRow> rows = sweep_mu(base, {0.5, 2.0, 8.0, 32.0}, jobs);
  bool all_bounded = true;
  for (const SweepRow& r : rows) all_bounded = all_bounded && r.completed && r.bounded;
  // final deviation is nonincreasing across the three largest mu
  const bool monotone = rows[1].final_dev_inf >= rows[2].final_dev_inf &&
                        rows[2].final_dev_inf >= rows[3].final_dev_inf;
  c.pass = all_bounded && monotone;
  c.detail = fmt("dev_inf(final) = {%.3e, %.3e, %.3e, %.3e}%s",
                 rows[0].final_dev_inf, rows[1].final_dev_inf,
                 rows[2].final_dev_inf, rows[3].final_dev_inf,
                 all_bounded ? "" : "; blow-up guard tripped");
  return c;
}

// criterion 10: the oracle toolbox validates against brute-force references
inline CriterionResult oracle_unit_suite() {
  CriterionResult c{10, "oracle-unit-suite", false, "", 0.0, 5.0};
  // logistic ODE residual by centered differences
  double worst_resid = 0.0;
  const double h = 1e-6;
  for (const auto& [n0, r, mu] : {std::tuple{0.5, 1.0, 1.0},
                                  std::tuple{2.0, 0.0, 1.0},
                                  std::tuple{1.0, -0.5, 2.0}}) {
    for (double t = 0.1; t < 5.0; t += 0.1) {
      const double y = logistic_solution(n0, r, mu, t);
      const double dy = (logistic_solution(n0, r, mu, t + h) -
                         logistic_solution(n0, r, mu, t - h)) / (2.0 * h);
      const double rhs = r * y - mu * y * y;
      const double scale = std::max({std::abs(dy), std::abs(rhs), 1e-12});
      worst_resid = std::max(worst_resid, std::abs(dy - rhs) / scale);
    }
  }

  // comparison bound dominates a brute-force integration
  bool bound_ok = true;
  {
    const double a = 0.8, b = 0.3, y0 = 2.0, dt = 1e-4;
    double y = y0, t = 0.0;
    while (t < 15.0 && bound_ok) {
      const double frac = t - std::floor(t);
      y += dt * (-a * y + (frac < 0.25 ? 1.2 : 0.0));
      t += dt;
      bound_ok = y <= ode_comparison_bound(y0, a, b, t, 0.0) * (1.0 + 1e-9);
    }
  }

  // exact-recovery of synthetic decay models
  std::vector<TimeSample> es, as;
  for (double t = 0.0; t <= 20.0; t += 0.1) es.push_back({t, 5.0 * std::exp(-0.3 * t)});
  for (double t = 5.0; t <= 50.0; t += 0.25) as.push_back({t, 2.0 / (t + 1.0)});
  const DecayFit ef = fit_decay(es, DecayModel::exponential, 0.0, 20.0);
  const DecayFit af = fit_decay(as, DecayModel::algebraic, 5.0, 50.0);
  const double fit_err = std::max(std::abs(ef.rate - 0.3) / 0.3,
                                  std::abs(af.rate - 1.0));

  c.pass = worst_resid <= 1e-6 && bound_ok && fit_err <= 1e-9;
  c.detail = fmt("ODE residual %.2e, comparison bound %s, fit error %.2e",
                 worst_resid, bound_ok ? "held" : "VIOLATED", fit_err);
  return c;
}

}  // namespace selftest_detail

// Runs the acceptance criteria (all of them by default) and collects one
// pass/fail line per criterion. Reports are deterministic for a fixed
// option set; wall-clock timings are carried separately.
inline SelftestReport selftest(const SelftestOptions& options = {}) {
  using namespace selftest_detail;
  SelftestReport report;
  Ctx ctx;

  testhooks::flip_laplacian_sign = options.corrupt_laplacian;

  auto wants = [&](int id) {
    return options.criteria.empty() ||
           std::find(options.criteria.begin(), options.criteria.end(), id) !=
               options.criteria.end();
  };
  auto timed = [&](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult c = fn();
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_seconds > 0.0 && c.seconds > c.budget_seconds) {
      c.pass = false;
      c.detail += " [runtime budget exceeded]";
    }
    report.criteria.push_back(std::move(c));
  };

  try {
    if (wants(1)) timed([&] { return operator_convergence(); });
    if (wants(2)) timed([&] { return projection_exactness(); });
    if (wants(3)) timed([&] { return logistic_oracle(ctx); });
    if (wants(5)) timed([&] { return l1_decay(ctx); });
    if (wants(6)) timed([&] { return exponential_rates(ctx); });
    if (wants(7)) timed([&] { return energy_monotonicity(ctx); });
    if (wants(8)) timed([&] { return algebraic_profile(ctx); });
    if (wants(4)) timed([&] { return positivity_all_runs(ctx); });
    if (wants(9)) timed([&] { return mu_sweep_sanity(options.jobs); });
    if (wants(10)) timed([&] { return oracle_unit_suite(); });
  } catch (const std::exception& e) {
    CriterionResult c;
    c.id = 0;
    c.name = "suite-aborted";
    c.pass = false;
    c.detail = e.what();
    report.criteria.push_back(std::move(c));
  }

  testhooks::flip_laplacian_sign = false;

  std::sort(report.criteria.begin(), report.criteria.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  for (const CriterionResult& c : report.criteria)
    report.all_pass = report.all_pass && c.pass;
  return report;
}

}  // namespace chemflow
