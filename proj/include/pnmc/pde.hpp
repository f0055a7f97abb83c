#pragma once

#include <array>
#include <functional>

#include "pnmc/grid.hpp"
#include "pnmc/meridian.hpp"

namespace pnmc {

/// Norms of the three residual equations over the valid interior.
/// epsilon is +1/-1 for the indefinite-metric system and 0 for the
/// Euclidean one; excluded counts grid nodes dropped because |mu| fell
/// below the floor of 1e-12 (their stencil neighborhoods are skipped too).
struct ResidualReport {
  std::array<double, 3> sup{};
  std::array<double, 3> rms{};
  int epsilon = 0;
  int excluded = 0;
};

/// Five-point Laplacian; the boundary ring of the result is NaN.
GridField laplacian(const GridField& f);

/// Residuals of the system characterizing canonical-parameter fields of
/// surfaces with parallel normalized mean curvature in Euclidean space:
///   r1 = nu_u - lam_v + lam (ln|mu|)_v
///   r2 = nu_v - lam_u + lam (ln|mu|)_u
///   r3 = nu^2 - lam^2 - mu^2 - |mu| (Laplacian ln|mu|)/2
ResidualReport residual_euclidean(const GridField& lam, const GridField& mu,
                                  const GridField& nu);

/// Same first two equations; the third becomes
///   r3 = eps (nu^2 - lam^2 + mu^2) - |mu| (Laplacian ln|mu|)/2
/// with eps = +1 when the mean curvature vector is spacelike, -1 timelike.
ResidualReport residual_minkowski(const GridField& lam, const GridField& mu,
                                  const GridField& nu, int eps);

struct SolutionFields {
  GridField lam, mu, nu;
};

/// Closed-form solution fields of the two model families, expressed in
/// canonical parameters: the grid coordinates are pushed through the inverse
/// rotated chart and the native-parameter formulas are sampled there.
/// kappa is the directrix curvature as a function of the native v.
SolutionFields model_solution(MeridianFamily family,
                              const std::function<double(double)>& kappa,
                              const GridGeometry& g);

}  // namespace pnmc
