#include "pnmc/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "pnmc/errors.hpp"
#include "pnmc/frame_invariants.hpp"
#include "pnmc/grid.hpp"
#include "pnmc/interp.hpp"

namespace pnmc {
namespace {

double simpson_slice(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& fn, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
  if (depth > 48) {
    fail(ErrorKind::quadrature_failure, "quadrature refinement exhausted");
  }
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  if (!std::isfinite(flm) || !std::isfinite(frm)) {
    fail(ErrorKind::quadrature_failure, "integrand is not finite");
  }
  const double left = simpson_slice(a, fa, m, fm, flm);
  const double right = simpson_slice(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;  // Richardson correction
  }
  return adaptive_step(fn, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
         adaptive_step(fn, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
}

// One monotone axis of the integral reparametrization: cumulative integral
// of a positive weight, with forward and inverse evaluation.
class AxisMap {
public:
  AxisMap(std::function<double(double)> weight, double lo, double hi, double origin)
      : w_(std::move(weight)), lo_(lo), hi_(hi) {
    if (!(hi_ > lo_)) {
      fail(ErrorKind::config_error, "axis range is empty");
    }
    if (!(origin >= lo_ && origin <= hi_)) {
      fail(ErrorKind::config_error, "reparametrization origin is outside the axis range");
    }
    const int n = 512;
    x_.resize(n + 1);
    cum_.resize(n + 1);
    const double step = (hi_ - lo_) / n;
    x_[0] = lo_;
    cum_[0] = 0.0;
    for (int i = 1; i <= n; ++i) {
      x_[static_cast<std::size_t>(i)] = lo_ + i * step;
      const double inc =
          adaptive_simpson(w_, x_[static_cast<std::size_t>(i - 1)],
                           x_[static_cast<std::size_t>(i)], 1e-10 / n);
      if (!(inc > 0.0)) {
        fail(ErrorKind::non_monotone, "reparametrization weight is not strictly positive");
      }
      cum_[static_cast<std::size_t>(i)] = cum_[static_cast<std::size_t>(i - 1)] + inc;
    }
    shift_ = value_at(origin);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double forward(double t) const {
    if (t < lo_ - kSlack || t > hi_ + kSlack) {
      fail(ErrorKind::out_of_domain, "parameter is outside the reparametrized range");
    }
    return value_at(std::clamp(t, lo_, hi_)) - shift_;
  }
  double inverse(double s) const {
    const double target = s + shift_;
    const double span = cum_.back();
    if (target < -kSlack * span || target > span * (1.0 + kSlack)) {
      fail(ErrorKind::out_of_domain, "parameter is outside the reparametrized range");
    }
    const double t = std::clamp(target, 0.0, span);
    // Bracket on the cumulative table, then safeguarded Newton.
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - cum_.begin());
    k = std::min(std::max<std::size_t>(k, 1), cum_.size() - 1) - 1;
    double a = x_[k], b = x_[k + 1];
    double u = 0.5 * (a + b);
    for (int iter = 0; iter < 100; ++iter) {
      const double f = value_at(u) - t;
      if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(t))) break;
      if (f > 0.0) {
        b = u;
      } else {
        a = u;
      }
      const double df = w_(u);
      double next = u - f / df;
      if (!(next > a && next < b)) {
        next = 0.5 * (a + b);
      }
      u = next;
    }
    return u;
  }

private:
  double value_at(double t) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - x_.begin());
    k = std::min(std::max<std::size_t>(k, 1), x_.size() - 1) - 1;
    return cum_[k] + adaptive_simpson(w_, x_[k], t, 1e-13);
  }

  static constexpr double kSlack = 1e-9;
  std::function<double(double)> w_;
  double lo_, hi_, shift_ = 0.0;
  std::vector<double> x_, cum_;
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = fn(a), fb = fn(b), fm = fn(m);
  if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm)) {
    fail(ErrorKind::quadrature_failure, "integrand is not finite");
  }
  const double whole = simpson_slice(a, fa, b, fb, fm);
  return adaptive_step(fn, a, fa, b, fb, m, fm, whole, std::max(tol, 1e-16), 0);
}

double canonicity_residual(const SurfaceMap& m, const ParamDomain& d, double h) {
  d.validate();
  if (h <= 0.0) h = default_fd_step(d);
  const Signature s = m.signature();
  const double jet_h = m.has_analytic_jet() ? 0.0 : h;
  std::vector<double> res(static_cast<std::size_t>(d.n_u) * d.n_v, 0.0);
  parallel_for(d.n_u * d.n_v, [&](int idx) {
    const SurfaceJet j = eval_jet(m, d.u(idx / d.n_v), d.v(idx % d.n_v), 2, jet_h);
    const FirstForm g = first_form(j, s);
    const double mu = mu_magnitude(j, s);
    const double target = 1.0 / mu;
    res[static_cast<std::size_t>(idx)] =
        std::max({std::abs(g.E - target), std::abs(g.F), std::abs(g.G - target)}) / target;
  });
  return *std::max_element(res.begin(), res.end());
}

SeparableFactors separable_factors(const SurfaceMap& m, const ParamDomain& d,
                                   double tol_orthogonal, double tol_separable) {
  d.validate();
  const Signature s = m.signature();
  const double jet_h = m.has_analytic_jet() ? 0.0 : default_fd_step(d);
  const GridGeometry geom = GridGeometry::from_domain(d);
  GridField e_mu(geom), g_mu(geom), f_abs(geom), scale(geom);
  parallel_for(geom.count(), [&](int idx) {
    const SurfaceJet j = eval_jet(m, geom.u(idx / d.n_v), geom.v(idx % d.n_v), 2, jet_h);
    const FirstForm g = first_form(j, s);
    const double mu = mu_magnitude(j, s);
    const std::size_t k = static_cast<std::size_t>(idx);
    e_mu.values[k] = g.E * mu;
    g_mu.values[k] = g.G * mu;
    f_abs.values[k] = std::abs(g.F);
    scale.values[k] = std::max(std::abs(g.E), std::abs(g.G));
  });
  const double f_sup = sup_norm(f_abs);
  if (f_sup > tol_orthogonal * std::max(1.0, sup_norm(scale))) {
    fail(ErrorKind::not_orthogonal, "chart is not orthogonal: F does not vanish");
  }

  SeparableFactors out;
  out.u_range = {d.u_min, d.u_max};
  out.v_range = {d.v_min, d.v_max};
  out.u_nodes.resize(static_cast<std::size_t>(d.n_u));
  out.phi_values.resize(static_cast<std::size_t>(d.n_u));
  out.v_nodes.resize(static_cast<std::size_t>(d.n_v));
  out.psi_values.resize(static_cast<std::size_t>(d.n_v));
  for (int i = 0; i < d.n_u; ++i) {
    double sum = 0.0;
    for (int j = 0; j < d.n_v; ++j) sum += e_mu.at(i, j);
    out.u_nodes[static_cast<std::size_t>(i)] = d.u(i);
    out.phi_values[static_cast<std::size_t>(i)] = sum / d.n_v;
  }
  for (int j = 0; j < d.n_v; ++j) {
    double sum = 0.0;
    for (int i = 0; i < d.n_u; ++i) sum += g_mu.at(i, j);
    out.v_nodes[static_cast<std::size_t>(j)] = d.v(j);
    out.psi_values[static_cast<std::size_t>(j)] = sum / d.n_u;
  }
  double err = 0.0;
  for (int i = 0; i < d.n_u; ++i) {
    for (int j = 0; j < d.n_v; ++j) {
      const double phi = out.phi_values[static_cast<std::size_t>(i)];
      const double psi = out.psi_values[static_cast<std::size_t>(j)];
      err = std::max(err, std::abs(e_mu.at(i, j) - phi) / std::abs(phi));
      err = std::max(err, std::abs(g_mu.at(i, j) - psi) / std::abs(psi));
    }
  }
  out.separability_error = err;
  if (err > tol_separable) {
    fail(ErrorKind::not_separable, "E|mu| or G|mu| does not split into one-variable factors");
  }
  for (double p : out.phi_values) {
    if (!(p > 0.0)) fail(ErrorKind::not_separable, "factor phi is not positive");
  }
  for (double p : out.psi_values) {
    if (!(p > 0.0)) fail(ErrorKind::not_separable, "factor psi is not positive");
  }
  auto phi_spline = std::make_shared<CubicSpline>(out.u_nodes, out.phi_values);
  auto psi_spline = std::make_shared<CubicSpline>(out.v_nodes, out.psi_values);
  out.phi = [phi_spline](double u) { return (*phi_spline)(u); };
  out.psi = [psi_spline](double v) { return (*psi_spline)(v); };
  return out;
}

std::pair<SurfaceMap, Reparametrization> reparametrize_integral(
    const SurfaceMap& m, const SeparableFactors& f, std::array<double, 2> origin) {
  if (!f.phi || !f.psi) {
    fail(ErrorKind::config_error, "separable factors must provide evaluators");
  }
  const auto sqrt_of = [](const std::function<double(double)>& g) {
    return [g](double t) {
      const double val = g(t);
      return val > 0.0 ? std::sqrt(val) : -1.0;  // flagged by the positivity check
    };
  };
  auto u_axis = std::make_shared<AxisMap>(sqrt_of(f.phi), f.u_range[0], f.u_range[1], origin[0]);
  auto v_axis = std::make_shared<AxisMap>(sqrt_of(f.psi), f.v_range[0], f.v_range[1], origin[1]);

  Reparametrization rep;
  rep.kind = ChartKind::axis_aligned_integral;
  rep.forward = [u_axis, v_axis](double u, double v) {
    return std::array<double, 2>{u_axis->forward(u), v_axis->forward(v)};
  };
  rep.inverse = [u_axis, v_axis](double a, double b) {
    return std::array<double, 2>{u_axis->inverse(a), v_axis->inverse(b)};
  };

  SurfaceMap base = m;
  SurfaceMap out(m.signature(), [base, u_axis, v_axis](double a, double b) {
    return base.position(u_axis->inverse(a), v_axis->inverse(b));
  });
  out.set_bounds({u_axis->forward(u_axis->lo()), u_axis->forward(u_axis->hi()),
                  v_axis->forward(v_axis->lo()), v_axis->forward(v_axis->hi())});
  return {std::move(out), std::move(rep)};
}

Reparametrization meridian_canonical_chart(MeridianFamily family) {
  Reparametrization rep;
  rep.kind = ChartKind::closed_form_rotated;
  if (family == MeridianFamily::euclidean) {
    rep.forward = [](double u, double v) {
      const double w = std::sqrt(u * u + 2.0 * u + 5.0);
      const double s = std::log(u + 1.0 + w);
      return std::array<double, 2>{s + v, -s + v};
    };
    rep.inverse = [](double a, double b) {
      const double s = 0.5 * (a - b);
      const double u = 0.5 * (std::exp(s) - 4.0 * std::exp(-s)) - 1.0;
      return std::array<double, 2>{u, 0.5 * (a + b)};
    };
  } else {
    rep.forward = [](double u, double v) {
      if (!(u > -1.0)) {
        fail(ErrorKind::domain_violation, "chart requires u > -1");
      }
      const double q = std::sqrt(u + 1.0);
      return std::array<double, 2>{q + 0.5 * v, -q + 0.5 * v};
    };
    rep.inverse = [](double a, double b) {
      if (!(a > b)) {
        fail(ErrorKind::domain_violation, "chart requires the first parameter to exceed the second");
      }
      const double q = 0.5 * (a - b);
      return std::array<double, 2>{q * q - 1.0, a + b};
    };
  }
  return rep;
}

SurfaceMap composed_surface(const SurfaceMap& m, const Reparametrization& r) {
  SurfaceMap base = m;
  auto inverse = r.inverse;
  return SurfaceMap(m.signature(), [base, inverse](double a, double b) {
    const std::array<double, 2> uv = inverse(a, b);
    return base.position(uv[0], uv[1]);
  });
}

}  // namespace pnmc
