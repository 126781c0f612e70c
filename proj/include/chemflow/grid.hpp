#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "chemflow/errors.hpp"

namespace chemflow {

// Uniform rectangular cell grid on [0,lx] x [0,ly].
// Scalars live at cell centers; velocity components live on cell faces
// (MAC layout): u1 on vertical faces, u2 on horizontal faces.
struct Grid {
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  static Grid make(int nx, int ny, double lx, double ly) {
    if (nx < 8 || ny < 8)
      throw ConfigError("grid: nx and ny must be at least 8");
    if (!(lx > 0.0) || !(ly > 0.0))
      throw ConfigError("grid: domain side lengths must be positive");
    Grid g;
    g.nx = nx;
    g.ny = ny;
    g.lx = lx;
    g.ly = ly;
    g.dx = lx / nx;
    g.dy = ly / ny;
    return g;
  }

  int cells() const { return nx * ny; }
  double area() const { return lx * ly; }
  double cell_area() const { return dx * dy; }

  // cell-center coordinates
  double xc(int i) const { return (i + 0.5) * dx; }
  double yc(int j) const { return (j + 0.5) * dy; }
  // face coordinates
  double xf(int i) const { return i * dx; }
  double yf(int j) const { return j * dy; }

  bool same_as(const Grid& o) const {
    return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
  }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_as(b))
    throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

enum class BcType { neumann, dirichlet };

// Cell-centered scalar with a homogeneous boundary-condition tag.
// Ghost values are implied by the tag (mirror for Neumann, negation for
// Dirichlet) and are never stored.
struct ScalarField {
  Grid grid;
  BcType bc = BcType::neumann;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, BcType bc_tag = BcType::neumann,
                       double fill = 0.0)
      : grid(g), bc(bc_tag), values(static_cast<size_t>(g.cells()), fill) {}

  double& at(int i, int j) { return values[static_cast<size_t>(i + grid.nx * j)]; }
  double at(int i, int j) const { return values[static_cast<size_t>(i + grid.nx * j)]; }
};

// MAC velocity with no-slip walls: boundary faces hold the (zero) normal
// component; tangential wall values enter stencils as negated ghosts.
struct VectorField {
  Grid grid;
  std::vector<double> u1;  // (nx+1) x ny, index i + (nx+1)*j
  std::vector<double> u2;  // nx x (ny+1), index i + nx*j

  VectorField() = default;
  explicit VectorField(const Grid& g)
      : grid(g),
        u1(static_cast<size_t>((g.nx + 1) * g.ny), 0.0),
        u2(static_cast<size_t>(g.nx * (g.ny + 1)), 0.0) {}

  double& u1_at(int i, int j) { return u1[static_cast<size_t>(i + (grid.nx + 1) * j)]; }
  double u1_at(int i, int j) const { return u1[static_cast<size_t>(i + (grid.nx + 1) * j)]; }
  double& u2_at(int i, int j) { return u2[static_cast<size_t>(i + grid.nx * j)]; }
  double u2_at(int i, int j) const { return u2[static_cast<size_t>(i + grid.nx * j)]; }

  void enforce_no_slip() {
    for (int j = 0; j < grid.ny; ++j) {
      u1_at(0, j) = 0.0;
      u1_at(grid.nx, j) = 0.0;
    }
    for (int i = 0; i < grid.nx; ++i) {
      u2_at(i, 0) = 0.0;
      u2_at(i, grid.ny) = 0.0;
    }
  }
};

// Reductions use plain sequential loops so results are bit-reproducible
// for a fixed grid.

inline double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double integrate(const ScalarField& f) {
  return sum(f.values) * f.grid.cell_area();
}

inline double min_value(const ScalarField& f) {
  double m = f.values.empty() ? 0.0 : f.values[0];
  for (double x : f.values) m = std::min(m, x);
  return m;
}

inline double max_value(const ScalarField& f) {
  double m = f.values.empty() ? 0.0 : f.values[0];
  for (double x : f.values) m = std::max(m, x);
  return m;
}

inline double linf(const ScalarField& f) { return max_abs(f.values); }

inline double l2_norm(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.values) s += x * x;
  return std::sqrt(s * f.grid.cell_area());
}

inline double linf(const VectorField& v) {
  return std::max(max_abs(v.u1), max_abs(v.u2));
}

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline bool all_finite(const ScalarField& f) { return all_finite(f.values); }

inline bool all_finite(const VectorField& v) {
  return all_finite(v.u1) && all_finite(v.u2);
}

}  // namespace chemflow
