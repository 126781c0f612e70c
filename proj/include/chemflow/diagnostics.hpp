#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemflow {

// One time sample of the tracked norms and residuals. Column order is the
// CSV contract; keep csv_header() and to_csv() in sync with the fields.
struct DiagnosticsRow {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double l2_n = 0.0;
  double linf_n = 0.0;
  double dev_inf = 0.0;
  double grad_w_l2 = 0.0;
  double grad_w_l6 = 0.0;
  double grad_w_linf = 0.0;
  double u_l2 = 0.0;
  double u_linf = 0.0;
  double c_min = 0.0;
  double c_max = 0.0;
  double energy_f = 0.0;
  double div_residual = 0.0;
  double clamped_mass_cum = 0.0;
};

inline const char* csv_header() {
  return "t,dt,mass,l2_n,linf_n,dev_inf,grad_w_l2,grad_w_l6,grad_w_linf,"
         "u_l2,u_linf,c_min,c_max,energy_f,div_residual,clamped_mass_cum";
}

// Scientific notation with 17 significant digits: values round-trip
// exactly through the CSV.
inline std::string to_csv(const DiagnosticsRow& r) {
  const double vals[] = {r.t,         r.dt,        r.mass,       r.l2_n,
                         r.linf_n,    r.dev_inf,   r.grad_w_l2,  r.grad_w_l6,
                         r.grad_w_linf, r.u_l2,    r.u_linf,     r.c_min,
                         r.c_max,     r.energy_f,  r.div_residual,
                         r.clamped_mass_cum};
  std::string out;
  char buf[32];
  for (size_t k = 0; k < sizeof(vals) / sizeof(vals[0]); ++k) {
    std::snprintf(buf, sizeof(buf), "%.16e", vals[k]);
    if (k) out += ',';
    out += buf;
  }
  return out;
}

inline double csv_column(const DiagnosticsRow& r, const std::string& name) {
  if (name == "t") return r.t;
  if (name == "dt") return r.dt;
  if (name == "mass") return r.mass;
  if (name == "l2_n") return r.l2_n;
  if (name == "linf_n") return r.linf_n;
  if (name == "dev_inf") return r.dev_inf;
  if (name == "grad_w_l2") return r.grad_w_l2;
  if (name == "grad_w_l6") return r.grad_w_l6;
  if (name == "grad_w_linf") return r.grad_w_linf;
  if (name == "u_l2") return r.u_l2;
  if (name == "u_linf") return r.u_linf;
  if (name == "c_min") return r.c_min;
  if (name == "c_max") return r.c_max;
  if (name == "energy_f") return r.energy_f;
  if (name == "div_residual") return r.div_residual;
  if (name == "clamped_mass_cum") return r.clamped_mass_cum;
  throw std::invalid_argument("unknown diagnostics column '" + name + "'");
}

}  // namespace chemflow
