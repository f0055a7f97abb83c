#pragma once

#include <array>

#include "pnmc/grid.hpp"
#include "pnmc/surface.hpp"

namespace pnmc {

/// Second fundamental form evaluated on the orthonormal tangent pair
/// (e1, e2) obtained from {z_u, z_v}; values are normal-space vectors.
struct SecondForm {
  Vector4 e1, e2;
  Vector4 sigma_11, sigma_12, sigma_22;
};

/// Throws degenerate_metric when the induced metric fails positivity.
SecondForm second_form(const SurfaceJet& j, Signature s);

/// H = (sigma(e1,e1) + sigma(e2,e2))/2 over an orthonormal tangent pair.
Vector4 mean_curvature(const SurfaceJet& j, Signature s);

/// Matrix of the shape operator on the orthonormal tangent pair: entries
/// <sigma(ei,ej), xi> / <xi,xi>. Throws not_normal when xi has a tangent
/// component, lightlike_step when <xi,xi> vanishes.
Matrix2 shape_operator(const SurfaceJet& j, const Vector4& xi, Signature s);

/// The geometric frame {x, y, b, l}: b = H/||H||, l completes the normal
/// frame with positive orientation, and (x, y) diagonalize away the
/// l-component of sigma on the diagonal: <sigma(x,x), l> = <sigma(y,y), l> = 0.
struct GeometricFrame {
  Vector4 x, y, b, l;
  int eps_b = 1;  // <b,b>
  int eps_l = 1;  // <l,l>
};

/// Throws minimal_point when ||H|| <= tol, frame_degenerate when H is
/// lightlike or A_l is (numerically) zero, i.e. |mu| <= tol.
GeometricFrame geometric_frame(const SurfaceJet& j, Signature s, double tol = 1e-9);

/// |mu| from the point jet alone: the size of the trace-free part of the
/// second form along the spare normal. No frame-field stencil involved.
double mu_magnitude(const SurfaceJet& j, Signature s, double tol = 1e-9);

/// The eight scalars attached to the geometric frame field.
struct GeometricFunctions {
  double gamma1 = 0.0, gamma2 = 0.0;
  double nu1 = 0.0, nu2 = 0.0;
  double lambda = 0.0, mu = 0.0;
  double beta1 = 0.0, beta2 = 0.0;

  double nu() const { return 0.5 * (nu1 + nu2); }
};

/// Frame, first form, mean curvature and scalar functions at one point,
/// plus the frame's tangent components in the coordinate basis
/// (x = xu z_u + xv z_v, y = yu z_u + yv z_v).
struct FramePoint {
  GeometricFrame frame;
  GeometricFunctions fn;
  FirstForm form;
  Vector4 H;
  double xu = 0.0, xv = 0.0, yu = 0.0, yv = 0.0;
};

/// Evaluates the frame and all eight functions at (u, v). The derivative
/// scalars (gamma1, gamma2, beta1, beta2) come from central differences of
/// the frame field with step h; stencil frames are gauge-aligned to the
/// center frame first. Throws FrameFlip when no gauge aligns.
FramePoint frame_point(const SurfaceMap& m, double u, double v, double h);

GeometricFunctions geometric_functions(const SurfaceMap& m, double u, double v, double h);

/// Scalar invariants sampled over a parameter grid (one frame per node,
/// computed independently; the deterministic frame selection keeps the
/// gauge continuous on simply covered grids).
struct InvariantGrids {
  GridGeometry geom;
  GridField E, F, G, h_norm;
  GridField gamma1, gamma2, nu1, nu2, lambda, mu, beta1, beta2;
  GridField xu, xv, yu, yv;
  /// Self-inner-products of the normal frame (b, l); (+1, +1) in the
  /// definite case, (+1, -1) or (-1, +1) in the indefinite one. Constant
  /// over the grid for an admissible surface patch.
  int eps_b = 1, eps_l = 1;
};

InvariantGrids invariant_grids(const SurfaceMap& m, const ParamDomain& d, double h);

enum class PnmcTag { minimal_point, generic, pnmc_nonparallel_H, parallel_H };

const char* to_string(PnmcTag t);

struct PnmcClassification {
  PnmcTag tag = PnmcTag::generic;
  double sup_beta = 0.0;
  double nu_sum_variation = 0.0;
  int minimal_nodes = 0;
};

/// Grid classification: minimal_point if any node has ||H|| below the
/// minimal-point tolerance; otherwise thresholds on sup|beta| and the
/// variation of nu1 + nu2 decide. Pass h = 0 for the default stencil step.
PnmcClassification classify_pnmc(const SurfaceMap& m, const ParamDomain& d, double tol_beta,
                                 double tol_const, double h = 0.0, double tol_minimal = 1e-9);

/// Sup and RMS norms of the six-equation integrability residuals evaluated
/// on sampled invariant grids (boundary ring excluded). With reduced = true
/// the beta terms are dropped, giving the specialization that characterizes
/// parallel b.
struct IntegrabilityReport {
  std::array<double, 6> sup{};
  std::array<double, 6> rms{};
};

IntegrabilityReport integrability_residual(const InvariantGrids& g, bool reduced = false);

IntegrabilityReport integrability_residual(const SurfaceMap& m, const ParamDomain& d,
                                           double h = 0.0, bool reduced = false);

}  // namespace pnmc
