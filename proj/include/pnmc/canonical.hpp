#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "pnmc/meridian.hpp"
#include "pnmc/surface.hpp"

namespace pnmc {

/// Factor split E|mu| = phi(u), G|mu| = psi(v) of an orthogonal chart.
/// phi and psi are continuous evaluators; when produced by
/// separable_factors they interpolate the per-line averages sampled at the
/// grid nodes (also stored here for inspection).
struct SeparableFactors {
  std::function<double(double)> phi, psi;
  std::array<double, 2> u_range{0.0, 0.0}, v_range{0.0, 0.0};
  std::vector<double> u_nodes, phi_values;
  std::vector<double> v_nodes, psi_values;
  double separability_error = 0.0;
};

enum class ChartKind { axis_aligned_integral, closed_form_rotated };

/// Invertible change of surface parameters.
struct Reparametrization {
  ChartKind kind = ChartKind::axis_aligned_integral;
  std::function<std::array<double, 2>(double, double)> forward;  // (u,v) -> new
  std::function<std::array<double, 2>(double, double)> inverse;  // new -> (u,v)
};

/// Sup over the grid of max(|E - 1/|mu||, |F|, |G - 1/|mu||) / (1/|mu|).
/// Zero exactly for canonical parameters. h is the FD step for maps without
/// analytic jets (0 selects the default for the domain).
double canonicity_residual(const SurfaceMap& m, const ParamDomain& d, double h = 0.0);

/// Splits E|mu| and G|mu| into per-line averages. Throws not_orthogonal when
/// sup|F| exceeds tol_orthogonal (scaled by the metric size), not_separable
/// when the relative deviation from the averages exceeds tol_separable.
SeparableFactors separable_factors(const SurfaceMap& m, const ParamDomain& d,
                                   double tol_orthogonal = 1e-8, double tol_separable = 1e-6);

/// Axis-aligned canonical chart of an orthogonal separable input:
/// ubar = integral of sqrt(phi) from origin_u, vbar likewise. Quadrature is
/// adaptive composite Simpson to 1e-10; the inverse is bracketed
/// Newton on the cumulative table. The returned map evaluates the original
/// surface at the inverse parameters (position only, same point set).
std::pair<SurfaceMap, Reparametrization> reparametrize_integral(
    const SurfaceMap& m, const SeparableFactors& f, std::array<double, 2> origin);

/// The closed-form rotated canonical charts of the two model families.
Reparametrization meridian_canonical_chart(MeridianFamily family);

/// z(a, b) = m.position(inverse(a, b)) as a position-only map.
SurfaceMap composed_surface(const SurfaceMap& m, const Reparametrization& r);

/// Adaptive composite Simpson quadrature with Richardson acceptance test.
/// Throws quadrature_failure on non-finite values or refinement exhaustion.
double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double tol);

}  // namespace pnmc
