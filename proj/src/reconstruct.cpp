#include "pnmc/reconstruct.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>

#include "pnmc/canonical.hpp"
#include "pnmc/errors.hpp"
#include "pnmc/interp.hpp"

namespace pnmc {

namespace {

constexpr double kMuFloor = 1e-12;

struct MetricWeights {
  double eb = 1.0, el = 1.0;
};

MetricWeights weights(int eps) {
  if (eps == 0) return {1.0, 1.0};
  if (eps == 1 || eps == -1) return {static_cast<double>(eps), static_cast<double>(-eps)};
  fail(ErrorKind::config_error, "epsilon must be +1, -1, or 0 for the definite metric");
}

Signature ambient(int eps) {
  return eps == 0 ? Signature::euclidean() : Signature::minkowski();
}

/// Rows act on the frame column (x, y, b, l): d(frame_i) = sum_j A(i,j) frame_j.
Matrix4 assemble_au(double lam, double mu, double nu, double g1, double a,
                    const MetricWeights& w) {
  Matrix4 m;
  m(0, 1) = a * g1;
  m(0, 2) = a * nu;
  m(1, 0) = -a * g1;
  m(1, 2) = a * lam;
  m(1, 3) = a * mu;
  m(2, 0) = -w.eb * a * nu;
  m(2, 1) = -w.eb * a * lam;
  m(3, 1) = -w.el * a * mu;
  return m;
}

Matrix4 assemble_av(double lam, double mu, double nu, double g2, double a,
                    const MetricWeights& w) {
  Matrix4 m;
  m(0, 1) = -a * g2;
  m(0, 2) = a * lam;
  m(0, 3) = a * mu;
  m(1, 0) = a * g2;
  m(1, 2) = a * nu;
  m(2, 0) = -w.eb * a * lam;
  m(2, 1) = -w.eb * a * nu;
  m(3, 0) = -w.el * a * mu;
  return m;
}

double checked_scale(double mu) {
  if (!std::isfinite(mu) || std::abs(mu) < kMuFloor) {
    fail(ErrorKind::mu_vanishes, "|mu| below 1e-12: canonical scale 1/sqrt|mu| undefined");
  }
  return 1.0 / std::sqrt(std::abs(mu));
}

/// Second-order derivative along one grid axis, one-sided on the edges.
double axis_derivative(const GridField& f, int i, int j, bool along_u) {
  const GridGeometry& g = f.geom;
  const int n = along_u ? g.n_u : g.n_v;
  const double h = along_u ? g.h_u : g.h_v;
  const int k = along_u ? i : j;
  auto value = [&](int kk) { return along_u ? f.at(kk, j) : f.at(i, kk); };
  if (k == 0) return (-3.0 * value(0) + 4.0 * value(1) - value(2)) / (2.0 * h);
  if (k == n - 1) return (3.0 * value(n - 1) - 4.0 * value(n - 2) + value(n - 3)) / (2.0 * h);
  return (value(k + 1) - value(k - 1)) / (2.0 * h);
}

/// Connection data at one point and in one sweep direction.
struct PointConnection {
  Matrix4 a;
  double scale = 0.0;
};

using ConnectionProvider = std::function<PointConnection(double u, double v, bool along_u)>;

ConnectionProvider field_provider(const CanonicalFieldSet& f, double fd_step) {
  if (!f.lam || !f.mu || !f.nu) {
    fail(ErrorKind::config_error, "field set needs lam, mu, and nu callables");
  }
  const MetricWeights w = weights(f.epsilon);
  return [f, w, fd_step](double u, double v, bool along_u) {
    const double mu = f.mu(u, v);
    const double a = checked_scale(mu);
    const double lam = f.lam(u, v), nu = f.nu(u, v);
    auto sq = [&f](double uu, double vv) { return std::sqrt(std::abs(f.mu(uu, vv))); };
    PointConnection pc;
    pc.scale = a;
    if (along_u) {
      const double g1 = (sq(u, v + fd_step) - sq(u, v - fd_step)) / (2.0 * fd_step);
      pc.a = assemble_au(lam, mu, nu, g1, a, w);
    } else {
      const double g2 = (sq(u + fd_step, v) - sq(u - fd_step, v)) / (2.0 * fd_step);
      pc.a = assemble_av(lam, mu, nu, g2, a, w);
    }
    return pc;
  };
}

struct RkState {
  Vector4 z, x, y, b, l;

  friend RkState operator+(const RkState& s, const RkState& t) {
    return {s.z + t.z, s.x + t.x, s.y + t.y, s.b + t.b, s.l + t.l};
  }
  friend RkState operator*(double c, const RkState& s) {
    return {c * s.z, c * s.x, c * s.y, c * s.b, c * s.l};
  }
};

RkState derivative(const PointConnection& pc, const RkState& s, bool along_u) {
  const Matrix4& A = pc.a;
  auto row = [&](int i) {
    return A(i, 0) * s.x + A(i, 1) * s.y + A(i, 2) * s.b + A(i, 3) * s.l;
  };
  RkState d;
  d.z = pc.scale * (along_u ? s.x : s.y);
  d.x = row(0);
  d.y = row(1);
  d.b = row(2);
  d.l = row(3);
  return d;
}

/// One classical RK4 step along a coordinate line. `t` is the moving
/// coordinate; `c` the frozen one.
RkState rk4_step(const ConnectionProvider& conn, RkState s, double t, double c, double h,
                 bool along_u) {
  auto f = [&](double tt, const RkState& st) {
    const double u = along_u ? tt : c;
    const double v = along_u ? c : tt;
    return derivative(conn(u, v, along_u), st, along_u);
  };
  const RkState k1 = f(t, s);
  const RkState k2 = f(t + 0.5 * h, s + (0.5 * h) * k1);
  const RkState k3 = f(t + 0.5 * h, s + (0.5 * h) * k2);
  const RkState k4 = f(t + h, s + h * k3);
  return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double frame_drift(const FrameState& f, int eps) {
  const Signature s = ambient(eps);
  const MetricWeights w = weights(eps);
  const Vector4 frame[4] = {f.x, f.y, f.b, f.l};
  const double diag[4] = {1.0, 1.0, w.eb, w.el};
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      const double expect = (i == j) ? diag[i] : 0.0;
      worst = std::max(worst, std::abs(inner(frame[i], frame[j], s) - expect));
    }
  }
  return worst;
}

FrameState to_frame(const RkState& s) { return {s.z, s.x, s.y, s.b, s.l}; }
RkState to_state(const FrameState& f) { return {f.z, f.x, f.y, f.b, f.l}; }

/// Gram-Schmidt with the frame metric diag(1,1,eb,el); keeps z untouched.
/// Valid only near an orthonormal frame, which is the projection's use case.
void project_frame(RkState& s, int eps) {
  const Signature sig = ambient(eps);
  const MetricWeights w = weights(eps);
  auto normalize = [&](Vector4& f, double target) {
    const double q = inner(f, f, sig) / target;
    if (!(q > 0.5)) {
      fail(ErrorKind::frame_degenerate, "frame collapsed during re-orthonormalization");
    }
    f = (1.0 / std::sqrt(q)) * f;
  };
  normalize(s.x, 1.0);
  s.y = s.y - inner(s.y, s.x, sig) * s.x;
  normalize(s.y, 1.0);
  s.b = s.b - inner(s.b, s.x, sig) * s.x - inner(s.b, s.y, sig) * s.y;
  normalize(s.b, w.eb);
  s.l = s.l - inner(s.l, s.x, sig) * s.x - inner(s.l, s.y, sig) * s.y -
        (inner(s.l, s.b, sig) / w.eb) * s.b;
  normalize(s.l, w.el);
}

FrameGrid integrate_core(const ConnectionProvider& conn, int eps, const FrameState& initial,
                         const GridGeometry& g, const IntegrateOptions& opts) {
  if (g.n_u < 2 || g.n_v < 2) {
    fail(ErrorKind::grid_too_small, "frame integration needs at least a 2x2 grid");
  }
  FrameGrid out;
  out.geom = g;
  out.epsilon = eps;
  out.states.resize(static_cast<std::size_t>(g.count()));

  const bool spine_u = !opts.v_first;
  double spine_drift = 0.0;
  // Spine through the origin corner.
  {
    RkState s = to_state(initial);
    auto settle = [&](RkState& st) {
      if (opts.reorthonormalize) {
        spine_drift = std::max(spine_drift, frame_drift(to_frame(st), eps));
        project_frame(st, eps);
      }
    };
    if (spine_u) {
      out.states[static_cast<std::size_t>(g.idx(0, 0))] = to_frame(s);
      for (int i = 1; i < g.n_u; ++i) {
        s = rk4_step(conn, s, g.u(i - 1), g.v0, g.h_u, true);
        settle(s);
        out.states[static_cast<std::size_t>(g.idx(i, 0))] = to_frame(s);
      }
    } else {
      out.states[static_cast<std::size_t>(g.idx(0, 0))] = to_frame(s);
      for (int j = 1; j < g.n_v; ++j) {
        s = rk4_step(conn, s, g.v(j - 1), g.u0, g.h_v, false);
        settle(s);
        out.states[static_cast<std::size_t>(g.idx(0, j))] = to_frame(s);
      }
    }
  }

  // Transverse lines are independent once the spine exists.
  const int lines = spine_u ? g.n_u : g.n_v;
  std::vector<double> line_drift(static_cast<std::size_t>(lines), 0.0);
  parallel_for(lines, [&](int k) {
    double worst;
    // Drift is always measured before any projection, so max_drift keeps
    // reporting the raw per-step defect even with reorthonormalize on.
    auto settle = [&](RkState& st) {
      worst = std::max(worst, frame_drift(to_frame(st), eps));
      if (opts.reorthonormalize) project_frame(st, eps);
    };
    if (spine_u) {
      RkState s = to_state(out.states[static_cast<std::size_t>(g.idx(k, 0))]);
      worst = frame_drift(to_frame(s), eps);
      for (int j = 1; j < g.n_v; ++j) {
        s = rk4_step(conn, s, g.v(j - 1), g.u(k), g.h_v, false);
        settle(s);
        out.states[static_cast<std::size_t>(g.idx(k, j))] = to_frame(s);
      }
    } else {
      RkState s = to_state(out.states[static_cast<std::size_t>(g.idx(0, k))]);
      worst = frame_drift(to_frame(s), eps);
      for (int i = 1; i < g.n_u; ++i) {
        s = rk4_step(conn, s, g.u(i - 1), g.v(k), g.h_u, true);
        settle(s);
        out.states[static_cast<std::size_t>(g.idx(i, k))] = to_frame(s);
      }
    }
    line_drift[static_cast<std::size_t>(k)] = worst;
  });
  out.max_drift = std::max(
      spine_drift, *std::max_element(line_drift.begin(), line_drift.end()));
  if (out.max_drift > opts.drift_bound) {
    fail(ErrorKind::drift_exceeded, "frame orthonormality drift exceeded the configured bound");
  }
  return out;
}

/// Row-spline-then-column-spline interpolation over one scalar grid.
class Bicubic {
public:
  Bicubic(const GridGeometry& g, const std::vector<double>& values) {
    if (g.n_u < 2 || g.n_v < 2) {
      fail(ErrorKind::grid_too_small, "bicubic interpolation needs at least a 2x2 grid");
    }
    u_nodes_.reserve(static_cast<std::size_t>(g.n_u));
    for (int i = 0; i < g.n_u; ++i) u_nodes_.push_back(g.u(i));
    std::vector<double> v_nodes(static_cast<std::size_t>(g.n_v));
    for (int j = 0; j < g.n_v; ++j) v_nodes[static_cast<std::size_t>(j)] = g.v(j);
    rows_.reserve(static_cast<std::size_t>(g.n_u));
    for (int i = 0; i < g.n_u; ++i) {
      std::vector<double> row(static_cast<std::size_t>(g.n_v));
      for (int j = 0; j < g.n_v; ++j) {
        row[static_cast<std::size_t>(j)] = values[static_cast<std::size_t>(g.idx(i, j))];
      }
      rows_.emplace_back(v_nodes, std::move(row));
    }
  }

  double eval(double u, double v) const {
    std::vector<double> column(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) column[i] = rows_[i](v);
    return CubicSpline(u_nodes_, std::move(column))(u);
  }

private:
  std::vector<double> u_nodes_;
  std::vector<CubicSpline> rows_;
};

}  // namespace

ConnectionField connection_matrices(const GridField& lam, const GridField& mu,
                                    const GridField& nu, int eps) {
  if (!lam.geom.compatible(mu.geom) || !lam.geom.compatible(nu.geom)) {
    fail(ErrorKind::grid_mismatch, "connection fields disagree on grid geometry");
  }
  const GridGeometry& g = lam.geom;
  if (g.n_u < 3 || g.n_v < 3) {
    fail(ErrorKind::grid_too_small, "connection derivatives need at least a 3x3 grid");
  }
  const MetricWeights w = weights(eps);

  GridField sq(g);
  for (std::size_t k = 0; k < mu.values.size(); ++k) {
    const double m = mu.values[k];
    if (!std::isfinite(m) || std::abs(m) < kMuFloor) {
      fail(ErrorKind::mu_vanishes, "|mu| below 1e-12 at a grid node");
    }
    sq.values[k] = std::sqrt(std::abs(m));
  }

  ConnectionField out;
  out.geom = g;
  out.epsilon = eps;
  out.a_u.resize(static_cast<std::size_t>(g.count()));
  out.a_v.resize(static_cast<std::size_t>(g.count()));
  out.scale.resize(static_cast<std::size_t>(g.count()));
  for (int i = 0; i < g.n_u; ++i) {
    for (int j = 0; j < g.n_v; ++j) {
      const std::size_t k = static_cast<std::size_t>(g.idx(i, j));
      const double a = 1.0 / sq.values[k];
      const double g1 = axis_derivative(sq, i, j, false);
      const double g2 = axis_derivative(sq, i, j, true);
      out.a_u[k] = assemble_au(lam.values[k], mu.values[k], nu.values[k], g1, a, w);
      out.a_v[k] = assemble_av(lam.values[k], mu.values[k], nu.values[k], g2, a, w);
      out.scale[k] = a;
    }
  }
  return out;
}

CanonicalFieldSet model_field_set(MeridianFamily family,
                                  const std::function<double(double)>& kappa) {
  if (!kappa) fail(ErrorKind::config_error, "model fields need a curvature function");
  Reparametrization chart = meridian_canonical_chart(family);
  CanonicalFieldSet out;
  out.epsilon = (family == MeridianFamily::euclidean) ? 0 : 1;
  auto native = [chart](double u, double v) { return chart.inverse(u, v); };
  if (family == MeridianFamily::euclidean) {
    out.lam = [native, kappa](double u, double v) {
      const auto p = native(u, v);
      return kappa(p[1]) / (2.0 * std::sqrt(p[0] * p[0] + 2.0 * p[0] + 5.0));
    };
    out.mu = [native](double u, double v) {
      const auto p = native(u, v);
      return 2.0 / (p[0] * p[0] + 2.0 * p[0] + 5.0);
    };
  } else {
    out.lam = [native, kappa](double u, double v) {
      const auto p = native(u, v);
      return kappa(p[1]) / (2.0 * std::sqrt(p[0] + 1.0));
    };
    out.mu = [native](double u, double v) {
      const auto p = native(u, v);
      return -1.0 / (2.0 * (p[0] + 1.0));
    };
  }
  out.nu = out.lam;
  return out;
}

CanonicalFieldSet grid_field_set(const SolutionFields& fields, int eps) {
  if (!fields.lam.geom.compatible(fields.mu.geom) ||
      !fields.lam.geom.compatible(fields.nu.geom)) {
    fail(ErrorKind::grid_mismatch, "sampled fields disagree on grid geometry");
  }
  weights(eps);  // validate
  CanonicalFieldSet out;
  out.epsilon = eps;
  auto wrap = [&](const GridField& f) {
    auto interp = std::make_shared<Bicubic>(f.geom, f.values);
    return [interp](double u, double v) { return interp->eval(u, v); };
  };
  out.lam = wrap(fields.lam);
  out.mu = wrap(fields.mu);
  out.nu = wrap(fields.nu);
  return out;
}

FrameState default_initial_frame(int eps) {
  weights(eps);  // validate
  FrameState f;
  f.z = Vector4::zero();
  f.x = Vector4::basis(0);
  f.y = Vector4::basis(1);
  if (eps == -1) {
    f.b = Vector4::basis(3);
    f.l = -Vector4::basis(2);  // keeps det(x, y, b, l) = +1
  } else {
    f.b = Vector4::basis(2);
    f.l = Vector4::basis(3);
  }
  return f;
}

FrameGrid integrate_connection(const std::function<Matrix4(double, double)>& a_u,
                               const std::function<Matrix4(double, double)>& a_v,
                               const std::function<double(double, double)>& scale,
                               int eps, const FrameState& initial, const GridGeometry& g,
                               const IntegrateOptions& opts) {
  if (!a_u || !a_v || !scale) {
    fail(ErrorKind::config_error, "connection callables must all be set");
  }
  ConnectionProvider conn = [&a_u, &a_v, &scale](double u, double v, bool along_u) {
    PointConnection pc;
    pc.a = along_u ? a_u(u, v) : a_v(u, v);
    pc.scale = scale(u, v);
    return pc;
  };
  return integrate_core(conn, eps, initial, g, opts);
}

FrameGrid integrate_surface(const CanonicalFieldSet& fields, const FrameState& initial,
                            const GridGeometry& g, const IntegrateOptions& opts) {
  return integrate_core(field_provider(fields, opts.fd_step), fields.epsilon, initial, g,
                        opts);
}

double compatibility_defect(const CanonicalFieldSet& fields, const FrameState& initial,
                            const GridGeometry& g, const IntegrateOptions& opts) {
  IntegrateOptions u_first = opts;
  u_first.v_first = false;
  IntegrateOptions v_first = opts;
  v_first.v_first = true;
  const FrameGrid a = integrate_surface(fields, initial, g, u_first);
  const FrameGrid b = integrate_surface(fields, initial, g, v_first);
  const FrameState& fa = a.at(g.n_u - 1, g.n_v - 1);
  const FrameState& fb = b.at(g.n_u - 1, g.n_v - 1);
  double worst = 0.0;
  for (auto member : {&FrameState::z, &FrameState::x, &FrameState::y, &FrameState::b,
                      &FrameState::l}) {
    worst = std::max(worst, euclidean_norm(fa.*member - fb.*member));
  }
  return worst;
}

SurfaceMap interpolated_surface(const FrameGrid& frames) {
  const GridGeometry& g = frames.geom;
  auto parts = std::make_shared<std::vector<Bicubic>>();
  parts->reserve(4);
  for (int c = 0; c < 4; ++c) {
    std::vector<double> comp(static_cast<std::size_t>(g.count()));
    for (std::size_t k = 0; k < comp.size(); ++k) comp[k] = frames.states[k].z[c];
    parts->emplace_back(g, comp);
  }
  SurfaceMap m(ambient(frames.epsilon), [parts](double u, double v) {
    Vector4 p;
    for (int c = 0; c < 4; ++c) p[c] = (*parts)[static_cast<std::size_t>(c)].eval(u, v);
    return p;
  });
  m.set_bounds({g.u0, g.u(g.n_u - 1), g.v0, g.v(g.n_v - 1)});
  return m;
}

RoundtripReport roundtrip(const CanonicalFieldSet& fields, const GridGeometry& g,
                          const IntegrateOptions& opts) {
  const FrameGrid fg =
      integrate_surface(fields, default_initial_frame(fields.epsilon), g, opts);
  const SurfaceMap m = interpolated_surface(fg);
  const double h_fd = std::min(std::abs(g.h_u), std::abs(g.h_v)) / 8.0;

  RoundtripReport rep;
  rep.drift = fg.max_drift;
  if (g.n_u < 3 || g.n_v < 3) {
    fail(ErrorKind::grid_too_small, "round trip needs interior nodes");
  }
  const int nu_i = g.n_u - 2, nv_i = g.n_v - 2;
  std::vector<double> dl(static_cast<std::size_t>(nu_i * nv_i)),
      dm(dl.size()), dn(dl.size());
  parallel_for(nu_i * nv_i, [&](int k) {
    const int i = 1 + k / nv_i;
    const int j = 1 + k % nv_i;
    const double u = g.u(i), v = g.v(j);
    const GeometricFunctions gf = geometric_functions(m, u, v, h_fd);
    const std::size_t kk = static_cast<std::size_t>(k);
    dl[kk] = std::abs(std::abs(gf.lambda) - std::abs(fields.lam(u, v)));
    dm[kk] = std::abs(std::abs(gf.mu) - std::abs(fields.mu(u, v)));
    dn[kk] = std::abs(gf.nu() - fields.nu(u, v));
  });
  rep.sup_lam = *std::max_element(dl.begin(), dl.end());
  rep.sup_mu = *std::max_element(dm.begin(), dm.end());
  rep.sup_nu = *std::max_element(dn.begin(), dn.end());
  return rep;
}

}  // namespace pnmc
