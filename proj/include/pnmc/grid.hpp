#pragma once

#include <functional>
#include <vector>

#include "pnmc/errors.hpp"
#include "pnmc/surface.hpp"

namespace pnmc {

/// Uniform sampling lattice in the parameter plane. Nodes are inclusive of
/// both endpoints; index (i, j) maps to (u0 + i*h_u, v0 + j*h_v).
struct GridGeometry {
  int n_u = 0, n_v = 0;
  double u0 = 0.0, v0 = 0.0;
  double h_u = 0.0, h_v = 0.0;

  double u(int i) const { return u0 + i * h_u; }
  double v(int j) const { return v0 + j * h_v; }
  int count() const { return n_u * n_v; }
  int idx(int i, int j) const { return i * n_v + j; }

  static GridGeometry from_domain(const ParamDomain& d);
  bool compatible(const GridGeometry& other, double tol = 1e-12) const;
};

/// Scalar samples over a GridGeometry, row-major in u (u is the slow index).
struct GridField {
  GridGeometry geom;
  std::vector<double> values;

  GridField() = default;
  explicit GridField(const GridGeometry& g)
      : geom(g), values(static_cast<std::size_t>(g.count()), 0.0) {}

  double& at(int i, int j) { return values[static_cast<std::size_t>(geom.idx(i, j))]; }
  double at(int i, int j) const { return values[static_cast<std::size_t>(geom.idx(i, j))]; }

  static GridField sample(const GridGeometry& g, const std::function<double(double, double)>& f);
};

/// Max |.| over finite entries at least `inset` nodes from every edge.
double sup_norm(const GridField& f, int inset = 0);
/// Root mean square over the same set.
double rms_norm(const GridField& f, int inset = 0);
/// Number of non-finite entries in the inset interior.
int invalid_count(const GridField& f, int inset = 0);

/// Central differences in the interior; the boundary ring is NaN.
GridField d_du(const GridField& f);
GridField d_dv(const GridField& f);

/// Least-squares slope of log(y) against log(x). Used to measure convergence
/// orders; inputs must be positive.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Runs f(i) for i in [0, n) across worker threads. The PNMC_LAB_THREADS
/// environment variable caps the pool size; results must be written to
/// disjoint slots so the schedule cannot affect output.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace pnmc
