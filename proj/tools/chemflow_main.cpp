// chemflow: desk-scale simulator for a 2D chemotaxis-fluid system in the
// log-transformed variables, with built-in decay diagnostics.
//
// Subcommands:
//   run <config>       integrate one scenario, emit a diagnostics CSV
//   sweep <config>     run the same scenario across a list of mu values
//   fit <csv>          fit a decay model to one CSV column
//   selftest           run the acceptance suite
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "chemflow/chemflow.hpp"
#include "chemflow/selftest.hpp"

namespace {

using namespace chemflow;

void apply_overrides(RunConfig& cfg, const std::vector<std::string>& sets,
                     const std::string& out_override) {
  for (const std::string& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got '" + kv + "'");
    apply_config_entry(cfg, detail::trim(kv.substr(0, eq)),
                       detail::trim(kv.substr(eq + 1)));
  }
  if (!out_override.empty()) cfg.out_path = out_override;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
            const std::string& out_override) {
  RunConfig cfg = parse_config_file(config_path);
  apply_overrides(cfg, sets, out_override);
  const RunResult res = run(cfg);

  const DiagnosticsRow& last = res.rows.back();
  std::printf("integrated to t=%g in %zu steps (%zu rows)\n", last.t,
              res.trace.size() - 1, res.rows.size());
  std::printf("final: mass=%.6e  dev_inf=%.6e  |grad w|_L2=%.6e  |u|_inf=%.6e\n",
              last.mass, last.dev_inf, last.grad_w_l2, last.u_linf);
  bool all_pass = true;
  for (const BoundCheck& c : res.checks) {
    std::printf("check %-18s %s  worst_violation=%.3e slack=%.3e satisfied=%.3f\n",
                c.name.c_str(), c.pass() ? "PASS" : "FAIL", c.worst_violation,
                c.slack, c.satisfied_fraction);
    all_pass = all_pass && c.pass();
  }
  for (const NamedFit& f : res.fits)
    std::printf("fit %-14s %s rate=%.6e amplitude=%.6e r2=%.6f window=[%g,%g] n=%d\n",
                f.column.c_str(),
                f.fit.model == DecayModel::exponential ? "exp" : "alg",
                f.fit.rate, f.fit.amplitude, f.fit.r_squared,
                f.fit.window_start, f.fit.window_end, f.fit.samples);
  if (!cfg.out_path.empty() && !out_override.empty())
    std::fprintf(stderr, "wrote %s\n", cfg.out_path.c_str());
  return all_pass ? 0 : 1;
}

int cmd_sweep(const std::string& config_path, const std::string& mu_list,
              int jobs, const std::vector<std::string>& sets,
              const std::string& out_override) {
  RunConfig cfg = parse_config_file(config_path);
  apply_overrides(cfg, sets, "");
  std::vector<double> mus;
  std::stringstream ss(mu_list);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) mus.push_back(std::stod(tok));
  const std::vector<SweepRow> rows = sweep_mu(cfg, mus, jobs);

  std::printf("%12s %8s %14s %12s %8s  %s\n", "mu", "bounded", "final_dev_inf",
              "fit_rate", "fit_r2", "error");
  bool ok = true;
  std::string csv = "mu,bounded,final_dev_inf,fit_rate,fit_r2,error\n";
  for (const SweepRow& r : rows) {
    std::printf("%12.6g %8s %14.6e %12.6e %8.4f  %s\n", r.mu,
                r.bounded ? "yes" : "NO", r.final_dev_inf, r.fit_rate,
                r.fit_r_squared, r.error.c_str());
    char line[256];
    std::snprintf(line, sizeof(line), "%.16e,%d,%.16e,%.16e,%.16e,%s\n", r.mu,
                  r.bounded ? 1 : 0, r.final_dev_inf, r.fit_rate,
                  r.fit_r_squared, r.error.c_str());
    csv += line;
    ok = ok && r.completed && r.error.empty();
  }
  if (!out_override.empty()) {
    std::ofstream out(out_override, std::ios::trunc);
    if (!out) throw ConfigError("cannot write sweep summary to '" + out_override + "'");
    out << csv;
  }
  return ok ? 0 : 1;
}

int cmd_fit(const std::string& csv_path, const std::string& column,
            const std::string& model, const std::string& window) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("cannot open CSV '" + csv_path + "'");
  std::string header;
  if (!std::getline(in, header))
    throw ConfigError("CSV '" + csv_path + "' is empty");
  std::vector<std::string> cols;
  {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  int t_idx = -1, v_idx = -1;
  for (size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] == "t") t_idx = static_cast<int>(k);
    if (cols[k] == column) v_idx = static_cast<int>(k);
  }
  if (t_idx < 0 || v_idx < 0)
    throw ConfigError("CSV has no column '" + (v_idx < 0 ? column : "t") + "'");

  std::vector<TimeSample> series;
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string tok;
    TimeSample s;
    for (int k = 0; std::getline(ss, tok, ','); ++k) {
      if (k == t_idx) s.t = std::stod(tok);
      if (k == v_idx) s.value = std::stod(tok);
    }
    series.push_back(s);
  }
  if (series.empty()) throw ConfigError("CSV '" + csv_path + "' has no rows");

  DecayModel m;
  if (model == "exp") m = DecayModel::exponential;
  else if (model == "alg") m = DecayModel::algebraic;
  else throw ConfigError("--model must be 'exp' or 'alg'");

  double w0 = series.front().t, w1 = series.back().t;
  if (!window.empty()) {
    const auto comma = window.find(',');
    if (comma == std::string::npos)
      throw ConfigError("--window expects 'a,b'");
    w0 = std::stod(window.substr(0, comma));
    w1 = std::stod(window.substr(comma + 1));
  }
  const DecayFit fit = fit_decay(series, m, w0, w1);
  std::printf("column=%s model=%s rate=%.12e amplitude=%.12e r2=%.8f "
              "window=[%g,%g] samples=%d\n",
              column.c_str(), model.c_str(), fit.rate, fit.amplitude,
              fit.r_squared, fit.window_start, fit.window_end, fit.samples);
  return 0;
}

int cmd_selftest(const std::vector<int>& criteria, int jobs, bool corrupt) {
  SelftestOptions options;
  options.criteria = criteria;
  options.jobs = jobs;
  options.corrupt_laplacian = corrupt;
  const SelftestReport report = selftest(options);
  std::fputs(report.text().c_str(), stdout);
  for (const CriterionResult& c : report.criteria)
    std::fprintf(stderr, "# criterion %d (%s): %.2f s\n", c.id, c.name.c_str(),
                 c.seconds);
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chemotaxis-fluid simulator and verification harness"};
  app.require_subcommand(1);

  std::string config_path, out_override, mu_list, csv_path, column, window;
  std::string model = "exp";
  std::vector<std::string> sets;
  std::vector<int> criteria;
  int jobs = 2;
  bool corrupt = false;

  CLI::App* c_run = app.add_subcommand("run", "integrate one scenario config");
  c_run->add_option("config", config_path, "key = value config file")->required();
  c_run->add_option("--out", out_override, "override out_path");
  c_run->add_option("--set", sets, "override a config key, key=value");

  CLI::App* c_sweep = app.add_subcommand("sweep", "run a scenario across mu values");
  c_sweep->add_option("config", config_path, "key = value config file")->required();
  c_sweep->add_option("--mu", mu_list, "comma-separated mu values")->required();
  c_sweep->add_option("--jobs", jobs, "concurrent runs (default 2)");
  c_sweep->add_option("--out", out_override, "write the summary CSV here");
  c_sweep->add_option("--set", sets, "override a config key, key=value");

  CLI::App* c_fit = app.add_subcommand("fit", "fit a decay model to a CSV column");
  c_fit->add_option("csv", csv_path, "diagnostics CSV from `run`")->required();
  c_fit->add_option("--column", column, "column name")->required();
  c_fit->add_option("--model", model, "exp | alg");
  c_fit->add_option("--window", window, "fit window 'a,b' (default: all rows)");

  CLI::App* c_self = app.add_subcommand("selftest", "run the acceptance suite");
  c_self->add_option("--criterion", criteria, "run only these criteria");
  c_self->add_option("--jobs", jobs, "sweep concurrency (default 2)");
  c_self->add_flag("--corrupt-laplacian", corrupt,
                   "mutation canary: flip a stencil sign (must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(c_run)) return cmd_run(config_path, sets, out_override);
    if (app.got_subcommand(c_sweep))
      return cmd_sweep(config_path, mu_list, jobs, sets, out_override);
    if (app.got_subcommand(c_fit)) return cmd_fit(csv_path, column, model, window);
    return cmd_selftest(criteria, jobs, corrupt);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const BlowupError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 1;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "numerical failure: %s (residual %.3e after %d iterations)\n",
                 e.what(), e.residual, e.iterations);
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 1;
  }
}
