#pragma once

#include <stdexcept>
#include <string>

namespace chemflow {

// Configuration problems: unknown presets, bad key-value files, unwritable
// output paths. CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative solve failed to reach tolerance within its iteration cap.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& msg, double residual, int iterations)
      : std::runtime_error(msg), residual(residual), iterations(iterations) {}
  double residual;
  int iterations;
};

// The blow-up guard tripped: the density left the plausible range.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(const std::string& msg, double t, double n_inf)
      : std::runtime_error(msg), t(t), n_inf(n_inf) {}
  double t;
  double n_inf;
};

}  // namespace chemflow
