#pragma once

#include <functional>
#include <optional>

#include "pnmc/pseudo_euclidean.hpp"

namespace pnmc {

/// Closed parameter rectangle with an inclusive sampling grid.
struct ParamDomain {
  double u_min = 0.0, u_max = 1.0;
  double v_min = 0.0, v_max = 1.0;
  int n_u = 2, n_v = 2;

  double h_u() const { return (u_max - u_min) / (n_u - 1); }
  double h_v() const { return (v_max - v_min) / (n_v - 1); }
  double u(int i) const { return u_min + i * h_u(); }
  double v(int j) const { return v_min + j * h_v(); }

  void validate() const;
};

/// Partial derivatives of the chart at a point. Third-order entries are
/// meaningful only when order == 3.
struct SurfaceJet {
  double u = 0.0, v = 0.0;
  int order = 2;
  Vector4 z, z_u, z_v, z_uu, z_uv, z_vv;
  Vector4 z_uuu, z_uuv, z_uvv, z_vvv;
};

struct FirstForm {
  double E = 0.0, F = 0.0, G = 0.0;
  double det() const { return E * G - F * F; }
};

/// Immersed chart into E^4 or E^4_1. The position evaluator is mandatory;
/// analytic partials are optional and preferred by eval_jet when present.
/// Evaluators must be pure: queries may run concurrently.
class SurfaceMap {
public:
  using PositionFn = std::function<Vector4(double, double)>;
  using JetFn = std::function<SurfaceJet(double, double, int)>;

  struct Bounds {
    double u_min, u_max, v_min, v_max;
  };

  SurfaceMap(Signature signature, PositionFn position);
  SurfaceMap(Signature signature, PositionFn position, JetFn analytic_jet, int analytic_order);

  Signature signature() const { return signature_; }
  bool has_analytic_jet() const { return static_cast<bool>(jet_); }
  int analytic_order() const { return analytic_order_; }

  Vector4 position(double u, double v) const { return position_(u, v); }
  SurfaceJet analytic_jet(double u, double v, int order) const { return jet_(u, v, order); }

  void set_bounds(Bounds b) { bounds_ = b; }
  const std::optional<Bounds>& bounds() const { return bounds_; }

private:
  Signature signature_;
  PositionFn position_;
  JetFn jet_;
  int analytic_order_ = 0;
  std::optional<Bounds> bounds_;
};

/// Evaluates the jet of order 2 or 3. Falls back to central differences with
/// step h when the map has no analytic partials of the requested order; the
/// FD path requires the point to sit at least 2h (order 2) or 3h (order 3)
/// inside the map bounds.
SurfaceJet eval_jet(const SurfaceMap& m, double u, double v, int order, double h);

/// First fundamental form. Throws not_spacelike when the induced metric is
/// not positive definite (E <= 0 or EG - F^2 <= 0).
FirstForm first_form(const SurfaceJet& j, Signature s);

/// Default FD step used by grid sweeps: an eighth of the node spacing on the
/// finer axis.
double default_fd_step(const ParamDomain& d);

}  // namespace pnmc
