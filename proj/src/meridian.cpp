#include "pnmc/meridian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "pnmc/errors.hpp"

namespace pnmc {

namespace {

constexpr double kDriftTolerance = 1e-6;

using Arr = std::array<double, 8>;

Arr axpy(const Arr& y, double a, const Arr& d) {
  Arr r{};
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] + a * d[i];
  return r;
}

template <typename Deriv>
Arr rk4_step(const Deriv& deriv, double v, double h, const Arr& y) {
  const Arr k1 = deriv(v, y);
  const Arr k2 = deriv(v + 0.5 * h, axpy(y, 0.5 * h, k1));
  const Arr k3 = deriv(v + 0.5 * h, axpy(y, 0.5 * h, k2));
  const Arr k4 = deriv(v + h, axpy(y, h, k3));
  Arr r = y;
  for (std::size_t i = 0; i < y.size(); ++i) {
    r[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return r;
}

Vector4 head(const Arr& y) { return {{y[0], y[1], y[2], y[3]}}; }
Vector4 tail(const Arr& y) { return {{y[4], y[5], y[6], y[7]}}; }

// l'' = -l + kappa(v) (l x l'), posed in the e1,e2,e3 slice.
Arr spherical_deriv(const CurvatureProfile& kappa, double v, const Arr& y) {
  const Vector4 l = head(y);
  const Vector4 lp = tail(y);
  const Vector4 lpp = -l + kappa.value(v) * cross3(l, lp);
  return {lp[0], lp[1], lp[2], lp[3], lpp[0], lpp[1], lpp[2], lpp[3]};
}

// Planar Frenet system for the flat-chart coordinates (a, b).
Arr parabolic_deriv(const CurvatureProfile& kappa, double v, const Arr& y) {
  const double k = kappa.value(v);
  return {y[2], y[3], -k * y[3], k * y[2], 0.0, 0.0, 0.0, 0.0};
}

// Integrates from the anchor v = 0 both ways on a uniform lattice that covers
// [v_from, v_to]. Returns the lattice origin and the node states.
template <typename Deriv>
std::pair<double, std::vector<Arr>> integrate_lattice(const Deriv& deriv, const Arr& y0,
                                                      double v_from, double v_to, double step) {
  if (!(step > 0.0)) fail(ErrorKind::config_error, "integration step must be positive");
  if (!(v_from < v_to)) fail(ErrorKind::config_error, "directrix range is empty");
  if (v_from > 0.0 || v_to < 0.0) {
    fail(ErrorKind::config_error, "directrix range must contain the anchor v = 0");
  }

  const auto n_back = static_cast<std::size_t>(std::ceil(-v_from / step - 1e-12));
  const auto n_fwd = static_cast<std::size_t>(std::ceil(v_to / step - 1e-12));

  std::vector<Arr> states(n_back + n_fwd + 1);
  states[n_back] = y0;
  Arr y = y0;
  for (std::size_t i = 0; i < n_fwd; ++i) {
    y = rk4_step(deriv, step * static_cast<double>(i), step, y);
    states[n_back + 1 + i] = y;
  }
  y = y0;
  for (std::size_t i = 0; i < n_back; ++i) {
    y = rk4_step(deriv, -step * static_cast<double>(i), -step, y);
    states[n_back - 1 - i] = y;
  }
  return {-step * static_cast<double>(n_back), std::move(states)};
}

}  // namespace

CurvatureProfile CurvatureProfile::constant(double c) {
  CurvatureProfile p;
  p.value = [c](double) { return c; };
  p.deriv = [](double) { return 0.0; };
  p.description = "constant";
  return p;
}

CurvatureProfile CurvatureProfile::linear(double a, double b) {
  CurvatureProfile p;
  p.value = [a, b](double v) { return a + b * v; };
  p.deriv = [b](double) { return b; };
  p.description = "linear";
  return p;
}

CurvatureProfile CurvatureProfile::sinusoid(double a, double b, double omega, double phase) {
  CurvatureProfile p;
  p.value = [=](double v) { return a + b * std::sin(omega * v + phase); };
  p.deriv = [=](double v) { return b * omega * std::cos(omega * v + phase); };
  p.description = "sinusoid";
  return p;
}

CurvatureProfile CurvatureProfile::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  CurvatureProfile p;
  p.value = [coeffs](double v) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * v + coeffs[k];
    return acc;
  };
  p.deriv = [coeffs](double v) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) {
      acc = acc * v + static_cast<double>(k) * coeffs[k];
    }
    return acc;
  };
  p.description = "polynomial";
  return p;
}

Signature DirectrixCurve::signature() const {
  return family_ == MeridianFamily::euclidean ? Signature::euclidean() : Signature::minkowski();
}

DirectrixCurve::Sample DirectrixCurve::at(double v) const {
  const double lo = v_min();
  const double hi = v_max();
  if (v < lo - 1e-9 * step_ || v > hi + 1e-9 * step_) {
    fail(ErrorKind::out_of_domain, "directrix parameter outside the integrated range");
  }
  v = std::clamp(v, lo, hi);

  // One extra RK4 substep from the nearest stored node keeps the dense
  // output at the integrator's own accuracy.
  const auto k = static_cast<std::size_t>(
      std::clamp<long long>(std::llround((v - v0_) / step_), 0,
                            static_cast<long long>(states_.size()) - 1));
  const double vk = v0_ + step_ * static_cast<double>(k);
  const double delta = v - vk;

  Arr y = states_[k].y;
  if (std::abs(delta) > 1e-15 * std::max(1.0, std::abs(v))) {
    if (family_ == MeridianFamily::euclidean) {
      y = rk4_step([this](double t, const Arr& s) { return spherical_deriv(kappa_, t, s); }, vk,
                   delta, y);
    } else {
      y = rk4_step([this](double t, const Arr& s) { return parabolic_deriv(kappa_, t, s); }, vk,
                   delta, y);
    }
  }

  Sample out;
  const double k0 = kappa_.value(v);
  const double k1 = kappa_.deriv(v);
  if (family_ == MeridianFamily::euclidean) {
    out.l = head(y);
    out.l1 = tail(y);
    out.l2 = -out.l + k0 * cross3(out.l, out.l1);
    out.l3 = -out.l1 + k1 * cross3(out.l, out.l1) + k0 * cross3(out.l, out.l2);
  } else {
    const double a = y[0], b = y[1], ap = y[2], bp = y[3];
    const double app = -k0 * bp;
    const double bpp = k0 * ap;
    const double appp = -k1 * bp - k0 * bpp;
    const double bppp = k1 * ap + k0 * app;
    // Chart tangents z_a = e1 + a xi1, z_b = e2 + b xi1 of the paraboloid
    // section <l, l> = 0, <l, xi1> = -1.
    const Vector4 za = Vector4::basis(0) + a * xi1();
    const Vector4 zb = Vector4::basis(1) + b * xi1();
    out.l = a * Vector4::basis(0) + b * Vector4::basis(1) + 0.5 * (a * a + b * b) * xi1() + xi2();
    out.l1 = ap * za + bp * zb;
    out.l2 = app * za + bpp * zb + (ap * ap + bp * bp) * xi1();
    out.l3 = appp * za + bppp * zb + 3.0 * (ap * app + bp * bpp) * xi1();
  }
  return out;
}

DirectrixCurve spherical_curve(const CurvatureProfile& kappa, double v_from, double v_to,
                               double step) {
  const Arr y0{1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0};
  auto deriv = [&kappa](double v, const Arr& y) { return spherical_deriv(kappa, v, y); };
  auto [v0, states] = integrate_lattice(deriv, y0, v_from, v_to, step);

  double drift = 0.0;
  for (const Arr& s : states) {
    const Vector4 l = head(s);
    const Vector4 lp = tail(s);
    drift = std::max(drift, std::abs(dot(l, l) - 1.0));
    drift = std::max(drift, std::abs(dot(lp, lp) - 1.0));
    drift = std::max(drift, std::abs(dot(l, lp)));
  }
  if (drift > kDriftTolerance) {
    fail(ErrorKind::drift_exceeded, "spherical directrix lost its unit-speed invariants");
  }

  DirectrixCurve c;
  c.family_ = MeridianFamily::euclidean;
  c.kappa_ = kappa;
  c.v0_ = v0;
  c.step_ = step;
  c.drift_ = drift;
  c.states_.reserve(states.size());
  for (const Arr& s : states) c.states_.push_back({s});
  return c;
}

DirectrixCurve paraboloid_curve(const CurvatureProfile& kappa, double v_from, double v_to,
                                double step) {
  const Arr y0{0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
  auto deriv = [&kappa](double v, const Arr& y) { return parabolic_deriv(kappa, v, y); };
  auto [v0, states] = integrate_lattice(deriv, y0, v_from, v_to, step);

  const Signature sig = Signature::minkowski();
  double drift = 0.0;
  for (const Arr& s : states) {
    drift = std::max(drift, std::abs(s[2] * s[2] + s[3] * s[3] - 1.0));
    const Vector4 l = s[0] * Vector4::basis(0) + s[1] * Vector4::basis(1) +
                      0.5 * (s[0] * s[0] + s[1] * s[1]) * xi1() + xi2();
    drift = std::max(drift, std::abs(inner(l, l, sig)));
    drift = std::max(drift, std::abs(inner(l, xi1(), sig) + 1.0));
  }
  if (drift > kDriftTolerance) {
    fail(ErrorKind::drift_exceeded, "paraboloid directrix lost its lift invariants");
  }

  DirectrixCurve c;
  c.family_ = MeridianFamily::parabolic;
  c.kappa_ = kappa;
  c.v0_ = v0;
  c.step_ = step;
  c.drift_ = drift;
  c.states_.reserve(states.size());
  for (const Arr& s : states) c.states_.push_back({s});
  return c;
}

double MeridianProfile::u_inf() const {
  return family == MeridianFamily::euclidean ? -std::numeric_limits<double>::infinity() : -1.0;
}

void MeridianProfile::check(double u) const {
  if (!(u > u_inf())) {
    fail(ErrorKind::domain_violation, "meridian parameter at or below the profile pole");
  }
}

double MeridianProfile::f(double u, int order) const {
  check(u);
  if (family == MeridianFamily::euclidean) {
    const double w2 = u * u + 2.0 * u + 5.0;
    const double w = std::sqrt(w2);
    switch (order) {
      case 0: return w;
      case 1: return (u + 1.0) / w;
      case 2: return 4.0 / (w2 * w);
      case 3: return -12.0 * (u + 1.0) / (w2 * w2 * w);
      default: break;
    }
  } else {
    const double q = std::sqrt(u + 1.0);
    switch (order) {
      case 0: return q;
      case 1: return 0.5 / q;
      case 2: return -0.25 / (q * q * q);
      case 3: return 0.375 / (q * q * q * q * q);
      default: break;
    }
  }
  fail(ErrorKind::config_error, "profile derivative order must be 0..3");
}

double MeridianProfile::g(double u, int order) const {
  check(u);
  if (family == MeridianFamily::euclidean) {
    const double w2 = u * u + 2.0 * u + 5.0;
    const double w = std::sqrt(w2);
    switch (order) {
      case 0: return 2.0 * std::log(u + 1.0 + w);
      case 1: return 2.0 / w;
      case 2: return -2.0 * (u + 1.0) / (w2 * w);
      case 3: return -2.0 / (w2 * w) + 6.0 * (u + 1.0) * (u + 1.0) / (w2 * w2 * w);
      default: break;
    }
  } else {
    const double q = std::sqrt(u + 1.0);
    switch (order) {
      case 0: return -(2.0 / 3.0) * q * q * q;
      case 1: return -q;
      case 2: return -0.5 / q;
      case 3: return 0.25 / (q * q * q);
      default: break;
    }
  }
  fail(ErrorKind::config_error, "profile derivative order must be 0..3");
}

MeridianProfile MeridianProfile::standard(MeridianFamily family) { return {family}; }

SurfaceMap meridian_surface(MeridianFamily family, std::shared_ptr<const DirectrixCurve> curve,
                            const MeridianProfile& profile) {
  if (!curve) fail(ErrorKind::config_error, "meridian surface needs a directrix curve");
  if (curve->family() != family || profile.family != family) {
    fail(ErrorKind::config_error, "directrix, profile and requested family disagree");
  }

  const Vector4 axis = family == MeridianFamily::euclidean ? Vector4::basis(3) : xi1();

  auto jet = [curve, profile, axis](double u, double v, int order) {
    profile.check(u);
    const DirectrixCurve::Sample s = curve->at(v);
    const double f0 = profile.f(u, 0), f1 = profile.f(u, 1);
    const double g0 = profile.g(u, 0), g1 = profile.g(u, 1);

    SurfaceJet j;
    j.u = u;
    j.v = v;
    j.order = order;
    j.z = f0 * s.l + g0 * axis;
    j.z_u = f1 * s.l + g1 * axis;
    j.z_v = f0 * s.l1;
    if (order >= 2) {
      const double f2 = profile.f(u, 2), g2 = profile.g(u, 2);
      j.z_uu = f2 * s.l + g2 * axis;
      j.z_uv = f1 * s.l1;
      j.z_vv = f0 * s.l2;
      if (order >= 3) {
        const double f3 = profile.f(u, 3), g3 = profile.g(u, 3);
        j.z_uuu = f3 * s.l + g3 * axis;
        j.z_uuv = f2 * s.l1;
        j.z_uvv = f1 * s.l2;
        j.z_vvv = f0 * s.l3;
      }
    }
    return j;
  };

  constexpr double kHuge = 1e12;
  SurfaceMap::Bounds bounds;
  bounds.u_min = std::max(profile.u_inf(), -kHuge);
  bounds.u_max = kHuge;
  bounds.v_min = curve->v_min();
  bounds.v_max = curve->v_max();

  SurfaceMap m(curve->signature(), [jet](double u, double v) { return jet(u, v, 1).z; }, jet, 3);
  m.set_bounds(bounds);
  return m;
}

const char* to_string(MeridianFamily f) {
  return f == MeridianFamily::euclidean ? "euclidean" : "parabolic";
}

}  // namespace pnmc
