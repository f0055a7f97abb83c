#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pnmc/surface.hpp"

namespace pnmc {

/// The two rotational constructions: a spherical directrix about the e4 axis
/// in E^4, and a directrix on the lightlike paraboloid about the null axis
/// xi1 = (e3 + e4)/sqrt(2) in E^4_1.
enum class MeridianFamily { euclidean, parabolic };

const char* to_string(MeridianFamily f);

inline Vector4 xi1() { return {{0.0, 0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}}; }
inline Vector4 xi2() { return {{0.0, 0.0, -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}}; }

/// Geodesic curvature prescribed along the directrix, with its derivative
/// (needed for third-order jets of the swept surface).
struct CurvatureProfile {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::string description;

  static CurvatureProfile constant(double c);
  static CurvatureProfile linear(double a, double b);           // a + b v
  static CurvatureProfile sinusoid(double a, double b, double omega, double phase);
  static CurvatureProfile polynomial(std::vector<double> coeffs);
};

/// Unit-speed directrix integrated by classical RK4 with a fixed step.
/// Queries between nodes take one extra RK4 substep from the nearest stored
/// state, so sampled derivatives carry the integrator's accuracy everywhere.
class DirectrixCurve {
public:
  struct Sample {
    Vector4 l, l1, l2, l3;  // value and first three v-derivatives
  };

  Sample at(double v) const;

  double v_min() const { return v0_; }
  double v_max() const { return v0_ + step_ * static_cast<double>(states_.size() - 1); }
  double step() const { return step_; }
  MeridianFamily family() const { return family_; }
  Signature signature() const;
  /// Worst conservation violation across stored nodes (unit speed, and the
  /// sphere/paraboloid membership constraints).
  double drift() const { return drift_; }

private:
  friend DirectrixCurve spherical_curve(const CurvatureProfile&, double, double, double);
  friend DirectrixCurve paraboloid_curve(const CurvatureProfile&, double, double, double);

  // State is (l, l') for the spherical family and the flat-chart coordinates
  // (a, b, a', b') packed into the first components for the parabolic one.
  struct State {
    std::array<double, 8> y{};
  };

  DirectrixCurve() = default;

  MeridianFamily family_ = MeridianFamily::euclidean;
  CurvatureProfile kappa_;
  double v0_ = 0.0, step_ = 0.0, drift_ = 0.0;
  std::vector<State> states_;
};

/// Arc-length curve on the unit 2-sphere in the E^3 slice, from l(0) = e1,
/// l'(0) = e2, satisfying l'' = -l + kappa(v) (l x l'). The range must
/// contain 0. Throws drift_exceeded when conservation degrades past 1e-6.
DirectrixCurve spherical_curve(const CurvatureProfile& kappa, double v_from, double v_to,
                               double step);

/// Arc-length curve on the lightlike paraboloid, integrated in its flat
/// chart from (0, 0) with initial tangent (1, 0) and lifted on query.
/// Invariants of the lift: <l,l> = 0 and <l,xi1> = -1.
DirectrixCurve paraboloid_curve(const CurvatureProfile& kappa, double v_from, double v_to,
                                double step);

/// Meridian profile (f, g): arc-length plane curve data of the generator.
struct MeridianProfile {
  MeridianFamily family;

  double f(double u, int order = 0) const;
  double g(double u, int order = 0) const;
  /// Lower parameter bound (open); -inf for the euclidean family.
  double u_inf() const;
  void check(double u) const;

  static MeridianProfile standard(MeridianFamily family);
};

/// Builds z(u, v) = f(u) l(v) + g(u) A with A = e4 (euclidean) or xi1
/// (parabolic). The returned map carries analytic jets to order 3 and is
/// bounded by the curve range and the profile domain.
SurfaceMap meridian_surface(MeridianFamily family, std::shared_ptr<const DirectrixCurve> curve,
                            const MeridianProfile& profile);

}  // namespace pnmc
