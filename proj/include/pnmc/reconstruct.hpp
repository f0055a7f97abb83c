#pragma once

#include <functional>
#include <vector>

#include "pnmc/frame_invariants.hpp"
#include "pnmc/grid.hpp"
#include "pnmc/pde.hpp"
#include "pnmc/pseudo_euclidean.hpp"
#include "pnmc/surface.hpp"

namespace pnmc {

/// Position and adapted frame carried through the moving-frame integration.
struct FrameState {
  Vector4 z, x, y, b, l;
};

/// Coefficients of the frame derivative equations at each grid node: row i of
/// a_u holds d/du of frame component i expanded over (x, y, b, l), and scale
/// is 1/sqrt|mu|, the common factor with z_u = scale*x and z_v = scale*y.
/// Every matrix is skew-adjoint with respect to diag(1, 1, eps_b, eps_l) by
/// construction.
struct ConnectionField {
  GridGeometry geom;
  int epsilon = 0;  // 0 for the definite ambient metric, otherwise +1/-1
  std::vector<Matrix4> a_u, a_v;
  std::vector<double> scale;

  const Matrix4& au_at(int i, int j) const { return a_u[static_cast<std::size_t>(geom.idx(i, j))]; }
  const Matrix4& av_at(int i, int j) const { return a_v[static_cast<std::size_t>(geom.idx(i, j))]; }
  double scale_at(int i, int j) const { return scale[static_cast<std::size_t>(geom.idx(i, j))]; }
};

/// Builds the per-node connection from sampled fields. The derivative terms
/// (sqrt|mu|)_u and (sqrt|mu|)_v use second-order differences (one-sided on
/// the boundary ring so every node carries usable matrices).
ConnectionField connection_matrices(const GridField& lam, const GridField& mu,
                                    const GridField& nu, int eps = 0);

/// Fields in canonical parameters as callables, so the integrator can sample
/// between grid nodes. epsilon = 0 means the definite ambient metric.
struct CanonicalFieldSet {
  std::function<double(double, double)> lam, mu, nu;
  int epsilon = 0;
};

/// Closed-form solution fields of a model family (kappa as a function of the
/// native directrix parameter), composed with the inverse rotated chart.
CanonicalFieldSet model_field_set(MeridianFamily family,
                                  const std::function<double(double)>& kappa);

/// Bicubic-spline interpolants over sampled fields.
CanonicalFieldSet grid_field_set(const SolutionFields& fields, int eps = 0);

/// Frame at z = 0 aligned with the coordinate axes, orthonormal with respect
/// to diag(1, 1, eps, -eps) (identity axes when eps = 0) and positively
/// oriented.
FrameState default_initial_frame(int eps = 0);

struct FrameGrid {
  GridGeometry geom;
  int epsilon = 0;
  std::vector<FrameState> states;
  double max_drift = 0.0;  // worst orthonormality violation across nodes

  const FrameState& at(int i, int j) const {
    return states[static_cast<std::size_t>(geom.idx(i, j))];
  }
};

struct IntegrateOptions {
  double drift_bound = 1e-3;  // throws drift_exceeded beyond this
  double fd_step = 1e-4;      // step for the (sqrt|mu|) derivatives
  bool v_first = false;       // integrate the v spine first, then u lines
  // Project the frame back to orthonormality after every step, for long
  // integrations. Off by default so max_drift reports the accumulated
  // integration defect; with it on, max_drift reports the worst raw
  // single-step drift seen before a projection.
  bool reorthonormalize = false;
};

/// Low-level driver: classical RK4 for the linear frame system with the
/// connection supplied directly as callables a_u(u,v), a_v(u,v) and the
/// z-derivative factor scale(u,v). Integrates one spine through the grid
/// origin corner and then the transverse lines.
FrameGrid integrate_connection(const std::function<Matrix4(double, double)>& a_u,
                               const std::function<Matrix4(double, double)>& a_v,
                               const std::function<double(double, double)>& scale,
                               int eps, const FrameState& initial, const GridGeometry& g,
                               const IntegrateOptions& opts = {});

/// Integrates the moving-frame system of a field set with vanishing normal
/// torsion (beta1 = beta2 = 0) and equal normal curvatures nu1 = nu2 = nu.
FrameGrid integrate_surface(const CanonicalFieldSet& fields, const FrameState& initial,
                            const GridGeometry& g, const IntegrateOptions& opts = {});

/// Distance at the far grid corner between the u-first and v-first
/// integrations: max over (z, x, y, b, l) of the component-norm discrepancy.
/// Vanishes with the step size exactly when the fields are compatible.
double compatibility_defect(const CanonicalFieldSet& fields, const FrameState& initial,
                            const GridGeometry& g, const IntegrateOptions& opts = {});

/// Position-only map interpolating reconstructed grid positions by bicubic
/// splines, bounded by the grid rectangle.
SurfaceMap interpolated_surface(const FrameGrid& frames);

struct RoundtripReport {
  double sup_lam = 0.0;  // sup over interior nodes of ||lam_out| - |lam_in||
  double sup_mu = 0.0;
  double sup_nu = 0.0;
  double drift = 0.0;
};

/// Integrates the fields from the default initial frame, re-extracts the
/// geometric functions from the reconstructed positions through FD jets, and
/// reports sup-norm discrepancies of (|lambda|, |mu|, nu) over the interior.
RoundtripReport roundtrip(const CanonicalFieldSet& fields, const GridGeometry& g,
                          const IntegrateOptions& opts = {});

}  // namespace pnmc
