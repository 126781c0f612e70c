#pragma once

#include <atomic>
#include <fstream>
#include <thread>

#include "chemflow/config.hpp"
#include "chemflow/diagnostics.hpp"
#include "chemflow/functionals.hpp"
#include "chemflow/oracles.hpp"

namespace chemflow {

// Per-step samples kept in memory for checks that need full time
// resolution (energy monotonicity, the signal maximum principle).
struct StepTrace {
  double t = 0.0;
  double dt = 0.0;
  double energy_f = 0.0;
  double c_max = 0.0;
  double min_n = 0.0;
  double min_w = 0.0;
};

struct NamedFit {
  std::string column;
  DecayFit fit;
};

struct RunResult {
  std::vector<DiagnosticsRow> rows;
  std::vector<StepTrace> trace;
  std::vector<BoundCheck> checks;
  std::vector<NamedFit> fits;
  double mass0 = 0.0;
  DerivedConstants consts;
};

inline std::vector<TimeSample> column_series(const std::vector<DiagnosticsRow>& rows,
                                             const std::string& column) {
  std::vector<TimeSample> out;
  out.reserve(rows.size());
  for (const DiagnosticsRow& r : rows) out.push_back({r.t, csv_column(r, column)});
  return out;
}

// fit_decay with the documented floor handling: when the tail of the window
// is nonpositive (the quantity hit round-off), shrink the window to the
// positive prefix and require at least 10 samples there.
inline DecayFit fit_decay_shrink(const std::vector<TimeSample>& series,
                                 DecayModel model, double window_start,
                                 double window_end) {
  double end = window_end;
  for (const TimeSample& s : series) {
    if (s.t < window_start || s.t > window_end) continue;
    if (!(s.value > 0.0)) {
      end = std::min(end, s.t);
      break;
    }
  }
  const double shrunk = std::nextafter(end, window_start);
  return fit_decay(series, model, window_start, end < window_end ? shrunk : end);
}

namespace detail {

inline DiagnosticsRow make_row(const State& s, const SimParams& params,
                               double dt, double energy_a) {
  DiagnosticsRow row;
  const FieldNorms nm = norms(s, params);
  row.t = s.t;
  row.dt = dt;
  row.mass = nm.mass;
  row.l2_n = nm.l2_n;
  row.linf_n = nm.linf_n;
  row.dev_inf = nm.dev_inf;
  row.grad_w_l2 = nm.grad_w_l2;
  row.grad_w_l6 = nm.grad_w_l6;
  row.grad_w_linf = nm.grad_w_linf;
  row.u_l2 = nm.u_l2;
  row.u_linf = nm.u_linf;
  row.c_min = nm.c_min;
  row.c_max = nm.c_max;
  row.energy_f = energy(s, params, energy_a).f_value;
  row.div_residual = s.last_div_residual;
  row.clamped_mass_cum = s.clamped_mass_cum;
  return row;
}

inline BoundCheck evaluate_check(const std::string& name, const RunConfig& cfg,
                                 const RunResult& res) {
  const double w0 = cfg.window_start_or_default();
  const double w1 = cfg.window_end_or_default();
  BoundCheck check;
  check.name = name;

  if (name == "l1_decay") {
    // mass(t) <= |Omega| / (mu (t + gamma)) with 5% discretization slack
    check.slack = 0.05;
    check.satisfied_fraction = 0.0;
    int ok = 0;
    for (const DiagnosticsRow& r : res.rows) {
      const double bound =
          l1_decay_bound(res.consts, cfg.params.grid.area(), cfg.params.mu, r.t);
      const double viol = std::max(0.0, r.mass / bound - 1.0);
      check.worst_violation = std::max(check.worst_violation, viol);
      if (viol <= check.slack) ++ok;
    }
    check.satisfied_fraction =
        res.rows.empty() ? 0.0 : static_cast<double>(ok) / res.rows.size();
    return check;
  }
  if (name == "cmax_monotone") {
    // recovered signal maximum never increases (1e-12 relative slack)
    check.slack = 1e-12;
    int ok = 0, total = 0;
    for (size_t k = 1; k < res.trace.size(); ++k) {
      const double prev = res.trace[k - 1].c_max;
      const double viol = std::max(0.0, (res.trace[k].c_max - prev) / prev);
      check.worst_violation = std::max(check.worst_violation, viol);
      ++total;
      if (viol <= check.slack) ++ok;
    }
    check.satisfied_fraction = total ? static_cast<double>(ok) / total : 1.0;
    return check;
  }
  if (name == "positivity") {
    check.slack = 0.0;
    int ok = 0;
    for (const StepTrace& s : res.trace) {
      const double viol = std::max(0.0, std::max(-s.min_n, -s.min_w));
      check.worst_violation = std::max(check.worst_violation, viol);
      if (viol <= check.slack) ++ok;
    }
    check.satisfied_fraction =
        res.trace.empty() ? 1.0 : static_cast<double>(ok) / res.trace.size();
    return check;
  }
  if (name == "clamped_mass") {
    // cumulative positivity-clamp correction stays below 1e-8 of the
    // initial mass
    check.slack = 0.0;
    const double budget = 1e-8 * res.mass0;
    const double used = res.rows.empty() ? 0.0 : res.rows.back().clamped_mass_cum;
    check.worst_violation = std::max(0.0, used / budget - 1.0);
    check.satisfied_fraction = check.pass() ? 1.0 : 0.0;
    return check;
  }
  if (name == "energy_monotone") {
    // per-step forward differences of F stay below +1e-6 after burn-in
    check.slack = 1e-6;
    int ok = 0, total = 0;
    for (size_t k = 1; k < res.trace.size(); ++k) {
      if (res.trace[k].t < w0 || res.trace[k].t > w1) continue;
      const double diff = res.trace[k].energy_f - res.trace[k - 1].energy_f;
      check.worst_violation = std::max(check.worst_violation, std::max(0.0, diff));
      ++total;
      if (diff <= check.slack) ++ok;
    }
    check.satisfied_fraction = total ? static_cast<double>(ok) / total : 1.0;
    return check;
  }
  if (name == "n_inf_sandwich")
    return two_sided_algebraic_check(column_series(res.rows, "linf_n"), w0, w1,
                                     25.0, name);
  if (name == "gradw_inf_tbound")
    return two_sided_algebraic_check(column_series(res.rows, "grad_w_linf"), w0,
                                     w1, 50.0, name);
  if (name == "gradw_l2_to_zero") {
    // integral |grad w|^2 decays to at most 1% of its peak
    check.slack = 0.0;
    double peak = 0.0;
    for (const DiagnosticsRow& r : res.rows)
      peak = std::max(peak, r.grad_w_l2 * r.grad_w_l2);
    const double fin = res.rows.empty()
                           ? 0.0
                           : res.rows.back().grad_w_l2 * res.rows.back().grad_w_l2;
    check.worst_violation = peak > 0.0 ? std::max(0.0, fin / (0.01 * peak) - 1.0) : 0.0;
    check.satisfied_fraction = check.pass() ? 1.0 : 0.0;
    return check;
  }
  if (name == "u_l2_decay") {
    // kinetic-energy series is eventually decreasing (tail after burn-in)
    check.slack = 1e-9;
    double peak = 0.0;
    for (const DiagnosticsRow& r : res.rows) peak = std::max(peak, r.u_l2);
    int ok = 0, total = 0;
    const DiagnosticsRow* prev = nullptr;
    for (const DiagnosticsRow& r : res.rows) {
      if (r.t < w0 || r.t > w1) continue;
      if (prev != nullptr) {
        const double viol =
            peak > 0.0 ? std::max(0.0, (r.u_l2 - prev->u_l2) / peak) : 0.0;
        check.worst_violation = std::max(check.worst_violation, viol);
        ++total;
        if (viol <= check.slack) ++ok;
      }
      prev = &r;
    }
    check.satisfied_fraction = total ? static_cast<double>(ok) / total : 1.0;
    return check;
  }
  if (name == "u_l2_bounded") {
    // ultimate boundedness: the tail never exceeds the transient peak
    check.slack = 0.0;
    double head = 0.0, tail = 0.0;
    for (const DiagnosticsRow& r : res.rows) {
      if (r.t < w0)
        head = std::max(head, r.u_l2);
      else
        tail = std::max(tail, r.u_l2);
    }
    check.worst_violation = head > 0.0 ? std::max(0.0, tail / head - 1.0)
                                       : (tail > 0.0 ? 1.0 : 0.0);
    check.satisfied_fraction = check.pass() ? 1.0 : 0.0;
    return check;
  }
  throw ConfigError("config: unknown check '" + name + "'");
}

}  // namespace detail

// Integrates one configuration to t_end, sampling diagnostics at the output
// cadence, then evaluates the requested bound checks and decay fits and
// writes the CSV. Deterministic for a fixed configuration.
inline RunResult run(RunConfig cfg) {
  cfg.finalize();
  if (!cfg.out_path.empty()) {
    std::ofstream probe(cfg.out_path, std::ios::app);
    if (!probe)
      throw ConfigError("config: out_path '" + cfg.out_path + "' is not writable");
  }

  RunResult res;
  State s = init_state(cfg.params);
  res.mass0 = integrate(s.n);
  res.consts = derived_constants(cfg.params, res.mass0);
  const double guard_ref = blowup_guard_reference(s, cfg.params);

  auto push_trace = [&](const State& st, double dt) {
    StepTrace tr;
    tr.t = st.t;
    tr.dt = dt;
    tr.energy_f = energy(st, cfg.params, cfg.energy_a).f_value;
    tr.c_max = st.c0_max * std::exp(-min_value(st.w));
    tr.min_n = min_value(st.n);
    tr.min_w = min_value(st.w);
    res.trace.push_back(tr);
  };

  res.rows.push_back(detail::make_row(s, cfg.params, 0.0, cfg.energy_a));
  push_trace(s, 0.0);

  double next_output = cfg.output_every;
  const double t_end = cfg.params.t_end;
  while (s.t < t_end) {
    double dt = cfl_dt(s, cfg.params);
    dt = std::min(dt, t_end - s.t);
    State next = step_system_dt(s, cfg.params, cfg.fluid, dt);
    const double ninf = linf(next.n);
    if (!(ninf <= 1e6 * guard_ref) || !all_finite(next.n) || !all_finite(next.w))
      throw BlowupError("possible blow-up at t=" + std::to_string(next.t) +
                            " (||n||_inf=" + std::to_string(ninf) + ")",
                        next.t, ninf);
    s = std::move(next);
    push_trace(s, dt);
    if (s.t >= next_output - 1e-12 || s.t >= t_end) {
      res.rows.push_back(detail::make_row(s, cfg.params, dt, cfg.energy_a));
      while (next_output <= s.t + 1e-12) next_output += cfg.output_every;
    }
  }

  for (const std::string& name : cfg.checks)
    res.checks.push_back(detail::evaluate_check(name, cfg, res));

  for (const FitSpec& spec : cfg.fits) {
    const double w0 = spec.window_start >= 0.0 ? spec.window_start
                                               : cfg.params.t_end / 3.0;
    const double w1 = spec.window_end >= 0.0 ? spec.window_end : cfg.params.t_end;
    res.fits.push_back(
        {spec.column,
         fit_decay_shrink(column_series(res.rows, spec.column), spec.model, w0, w1)});
  }

  if (!cfg.out_path.empty()) {
    std::ofstream out(cfg.out_path, std::ios::trunc);
    if (!out)
      throw ConfigError("config: out_path '" + cfg.out_path + "' is not writable");
    out << csv_header() << '\n';
    for (const DiagnosticsRow& r : res.rows) out << to_csv(r) << '\n';
  }
  return res;
}

struct SweepRow {
  double mu = 0.0;
  bool completed = false;
  bool bounded = false;  // blow-up guard untriggered
  double final_dev_inf = 0.0;
  double fit_rate = 0.0;
  double fit_r_squared = 0.0;
  std::string error;
};

// Runs one simulation per mu value; independent states advance concurrently
// across `jobs` workers and results are reported in ascending-mu order.
inline std::vector<SweepRow> sweep_mu(const RunConfig& base,
                                      std::vector<double> mu_values, int jobs) {
  if (mu_values.empty()) throw ConfigError("sweep: need at least one mu value");
  for (double mu : mu_values)
    if (!(mu > 0.0)) throw ConfigError("sweep: mu values must be positive");
  std::sort(mu_values.begin(), mu_values.end());

  std::vector<SweepRow> rows(mu_values.size());
  std::atomic<size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const size_t k = cursor.fetch_add(1);
      if (k >= mu_values.size()) return;
      SweepRow& row = rows[k];
      row.mu = mu_values[k];
      try {
        RunConfig cfg = base;
        cfg.params.mu = mu_values[k];
        cfg.out_path.clear();  // sweep results stay in memory
        cfg.checks.clear();
        cfg.fits.clear();
        const RunResult res = run(cfg);
        row.completed = true;
        row.bounded = true;
        row.final_dev_inf = res.rows.back().dev_inf;
        try {
          const DecayFit fit = fit_decay_shrink(
              column_series(res.rows, "dev_inf"), DecayModel::exponential,
              cfg.window_start_or_default(), cfg.window_end_or_default());
          row.fit_rate = fit.rate;
          row.fit_r_squared = fit.r_squared;
        } catch (const std::exception& e) {
          row.error = std::string("fit: ") + e.what();
        }
      } catch (const BlowupError& e) {
        row.completed = true;
        row.bounded = false;
        row.error = e.what();
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };

  const int width = std::max(1, std::min<int>(jobs, static_cast<int>(mu_values.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(width));
  for (int k = 0; k < width; ++k) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  return rows;
}

}  // namespace chemflow
