#include "pnmc/frame_invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "pnmc/errors.hpp"

namespace pnmc {
namespace {

struct TangentBasis {
  Vector4 e1, e2;
  // e1 = a11 z_u, e2 = a21 z_u + a22 z_v
  double a11 = 0.0, a21 = 0.0, a22 = 0.0;
  FirstForm form;
};

TangentBasis tangent_basis(const SurfaceJet& j, Signature s) {
  FirstForm g;
  try {
    g = first_form(j, s);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::not_spacelike) {
      fail(ErrorKind::degenerate_metric, "induced metric is not positive definite");
    }
    throw;
  }
  const double det = g.det();
  if (!(g.E > 0.0) || !(det > 0.0)) {
    fail(ErrorKind::degenerate_metric, "induced metric is not positive definite");
  }
  TangentBasis tb;
  tb.form = g;
  tb.a11 = 1.0 / std::sqrt(g.E);
  tb.e1 = tb.a11 * j.z_u;
  // Gram-Schmidt step: e2 ~ z_v - (F/E) z_u, normalized by sqrt(det/E).
  const double inv = 1.0 / std::sqrt(det * g.E);
  tb.a21 = -g.F * inv;
  tb.a22 = g.E * inv;
  tb.e2 = tb.a21 * j.z_u + tb.a22 * j.z_v;
  return tb;
}

Vector4 normal_part(const Vector4& w, const TangentBasis& tb, Signature s) {
  // e1, e2 are spacelike unit vectors for any admissible surface.
  return w - inner(w, tb.e1, s) * tb.e1 - inner(w, tb.e2, s) * tb.e2;
}

SecondForm second_form_from(const SurfaceJet& j, const TangentBasis& tb, Signature s) {
  const Vector4 s_uu = normal_part(j.z_uu, tb, s);
  const Vector4 s_uv = normal_part(j.z_uv, tb, s);
  const Vector4 s_vv = normal_part(j.z_vv, tb, s);
  SecondForm out;
  out.e1 = tb.e1;
  out.e2 = tb.e2;
  const double a11 = tb.a11, a21 = tb.a21, a22 = tb.a22;
  out.sigma_11 = (a11 * a11) * s_uu;
  out.sigma_12 = a11 * (a21 * s_uu + a22 * s_uv);
  out.sigma_22 = (a21 * a21) * s_uu + (2.0 * a21 * a22) * s_uv + (a22 * a22) * s_vv;
  return out;
}

int sign_of(double x) { return x < 0.0 ? -1 : 1; }

struct FrameCandidate {
  Vector4 x, y;
  double mu = 0.0;
};

// sigma on the rotated pair x = c e1 + t e2, y = -t e1 + c e2.
Vector4 sigma_xx(const SecondForm& sf, double c, double t) {
  return (c * c) * sf.sigma_11 + (2.0 * c * t) * sf.sigma_12 + (t * t) * sf.sigma_22;
}
Vector4 sigma_xy(const SecondForm& sf, double c, double t) {
  return (c * t) * (sf.sigma_22 - sf.sigma_11) + (c * c - t * t) * sf.sigma_12;
}

struct FrameData {
  GeometricFrame frame;
  TangentBasis tb;
  SecondForm sf;
  Vector4 H;
  double cos_theta = 1.0, sin_theta = 0.0;
  double mu_abs = 0.0;
};

FrameData build_frame(const SurfaceJet& j, Signature s, double tol) {
  FrameData fd;
  fd.tb = tangent_basis(j, s);
  fd.sf = second_form_from(j, fd.tb, s);
  fd.H = 0.5 * (fd.sf.sigma_11 + fd.sf.sigma_22);

  if (euclidean_norm(fd.H) <= tol) {
    fail(ErrorKind::minimal_point, "mean curvature vector vanishes");
  }
  const double hh = inner(fd.H, fd.H, s);
  if (std::abs(hh) <= tol * tol) {
    fail(ErrorKind::frame_degenerate, "mean curvature vector is lightlike");
  }
  GeometricFrame& fr = fd.frame;
  fr.eps_b = sign_of(hh);
  fr.b = (1.0 / std::sqrt(std::abs(hh))) * fd.H;

  // Remaining normal direction: project the coordinate axes to the
  // orthogonal complement of span{e1, e2, b} and keep the best-conditioned
  // candidate.
  Vector4 best = Vector4::zero();
  double best_q = 0.0;
  for (int i = 0; i < 4; ++i) {
    Vector4 w = normal_part(Vector4::basis(i), fd.tb, s);
    w = w - (fr.eps_b * inner(w, fr.b, s)) * fr.b;
    const double q = std::abs(inner(w, w, s));
    if (q > best_q) {
      best_q = q;
      best = w;
    }
  }
  if (best_q <= tol * tol) {
    fail(ErrorKind::frame_degenerate, "normal complement of b is degenerate");
  }
  const double ql = inner(best, best, s);
  fr.eps_l = sign_of(ql);
  fr.l = (1.0 / std::sqrt(std::abs(ql))) * best;
  const int expected_eps_l = (s.index == 0) ? 1 : -fr.eps_b;
  if (fr.eps_l != expected_eps_l) {
    fail(ErrorKind::frame_degenerate, "normal frame has unexpected causal type");
  }
  if (det4(fd.tb.e1, fd.tb.e2, fr.b, fr.l) < 0.0) {
    fr.l = -1.0 * fr.l;
  }

  // Rotate the tangent pair so that sigma(x,x) and sigma(y,y) lose their
  // l-components. With m_ij = <sigma(ei,ej), l>, the trace m11 + m22 equals
  // <2H, l> = 0, so a rotation by theta0 with 2*theta0 = atan2(-d, off),
  // d = (m11 - m22)/2, off = m12, does it; |mu| there equals hypot(d, off).
  const double m11 = inner(fd.sf.sigma_11, fr.l, s);
  const double m22 = inner(fd.sf.sigma_22, fr.l, s);
  const double m12 = inner(fd.sf.sigma_12, fr.l, s);
  const double d = 0.5 * (m11 - m22);
  const double off = m12;
  const double amp = std::hypot(d, off);
  if (amp <= tol) {
    fail(ErrorKind::frame_degenerate, "second-form component along l vanishes");
  }
  fd.mu_abs = amp;
  const double theta0 = 0.5 * std::atan2(-d, off);

  // Four admissible rotations; prefer alignment of x with z_u, then of y
  // with z_v, then positive mu. The third rule settles grids where the
  // frame sits at 45 degrees to the coordinate directions and the first two
  // scores tie pairwise.
  FrameCandidate bestc;
  bool have = false;
  double best_s1 = 0.0, best_s2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double theta = theta0 + 0.5 * std::numbers::pi * k;
    const double c = std::cos(theta);
    const double t = std::sin(theta);
    FrameCandidate cand;
    cand.x = c * fd.tb.e1 + t * fd.tb.e2;
    cand.y = -t * fd.tb.e1 + c * fd.tb.e2;
    cand.mu = fr.eps_l * inner(sigma_xy(fd.sf, c, t), fr.l, s);
    const double s1 = inner(cand.x, j.z_u, s);
    const double s2 = inner(cand.y, j.z_v, s);
    const double scale1 = 1e-9 * std::max(1.0, std::abs(best_s1));
    const double scale2 = 1e-9 * std::max(1.0, std::abs(best_s2));
    bool take = false;
    if (!have || s1 > best_s1 + scale1) {
      take = true;
    } else if (s1 >= best_s1 - scale1) {
      if (s2 > best_s2 + scale2) {
        take = true;
      } else if (s2 >= best_s2 - scale2 && cand.mu > bestc.mu) {
        take = true;
      }
    }
    if (take) {
      bestc = cand;
      best_s1 = s1;
      best_s2 = s2;
      have = true;
      fd.cos_theta = c;
      fd.sin_theta = t;
    }
  }
  fr.x = bestc.x;
  fr.y = bestc.y;
  return fd;
}

// Tangent components of a tangent vector in the coordinate basis, from the
// dual-basis rule g * (wu, wv) = (<w,z_u>, <w,z_v>).
void tangent_components(const Vector4& w, const SurfaceJet& j, const FirstForm& g, Signature s,
                        double& wu, double& wv) {
  const double p = inner(w, j.z_u, s);
  const double q = inner(w, j.z_v, s);
  const double det = g.det();
  wu = (g.G * p - g.F * q) / det;
  wv = (g.E * q - g.F * p) / det;
}

// The eight gauges compatible with the frame construction: tangent rotation
// by a quarter turn (k = 0..3) optionally composed with the reflection
// (y, l) -> (-y, -l); b never flips because it is pinned to H.
GeometricFrame apply_gauge(const GeometricFrame& f, int k, bool reflect) {
  GeometricFrame out = f;
  switch (k & 3) {
    case 0: break;
    case 1: out.x = f.y; out.y = -1.0 * f.x; break;
    case 2: out.x = -1.0 * f.x; out.y = -1.0 * f.y; break;
    case 3: out.x = -1.0 * f.y; out.y = f.x; break;
  }
  if (reflect) {
    out.y = -1.0 * out.y;
    out.l = -1.0 * out.l;
  }
  return out;
}

double gauge_score(const GeometricFrame& f, const GeometricFrame& ref) {
  const auto ndot = [](const Vector4& a, const Vector4& b) {
    const double na = euclidean_norm(a);
    const double nb = euclidean_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
  };
  return ndot(f.x, ref.x) + ndot(f.y, ref.y) + ndot(f.l, ref.l);
}

GeometricFrame align_gauge(const GeometricFrame& f, const GeometricFrame& ref) {
  GeometricFrame best = f;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k) {
    for (int r = 0; r < 2; ++r) {
      GeometricFrame cand = apply_gauge(f, k, r == 1);
      const double score = gauge_score(cand, ref);
      if (score > best_score) {
        best_score = score;
        best = cand;
      }
    }
  }
  // Each normalized dot is 1 at perfect alignment; 2.5 of the maximal 3
  // tolerates discretization error but rejects genuinely incompatible
  // frames (any wrong axis costs at least one full unit).
  if (best_score < 2.5) {
    fail(ErrorKind::frame_flip, "no frame gauge aligns with the neighboring frame");
  }
  return best;
}

}  // namespace

const char* to_string(PnmcTag t) {
  switch (t) {
    case PnmcTag::minimal_point: return "minimal_point";
    case PnmcTag::generic: return "generic";
    case PnmcTag::pnmc_nonparallel_H: return "pnmc_nonparallel_H";
    case PnmcTag::parallel_H: return "parallel_H";
  }
  return "unknown";
}

SecondForm second_form(const SurfaceJet& j, Signature s) {
  return second_form_from(j, tangent_basis(j, s), s);
}

Vector4 mean_curvature(const SurfaceJet& j, Signature s) {
  const SecondForm sf = second_form(j, s);
  return 0.5 * (sf.sigma_11 + sf.sigma_22);
}

Matrix2 shape_operator(const SurfaceJet& j, const Vector4& xi, Signature s) {
  const double nx = euclidean_norm(xi);
  const double tol = 1e-9;
  if (nx == 0.0) {
    fail(ErrorKind::lightlike_step, "shape operator direction vanishes");
  }
  if (std::abs(inner(xi, j.z_u, s)) > tol * nx * euclidean_norm(j.z_u) ||
      std::abs(inner(xi, j.z_v, s)) > tol * nx * euclidean_norm(j.z_v)) {
    fail(ErrorKind::not_normal, "shape operator direction has a tangent component");
  }
  const double q = inner(xi, xi, s);
  if (std::abs(q) <= tol * nx * nx) {
    fail(ErrorKind::lightlike_step, "shape operator direction is lightlike");
  }
  const SecondForm sf = second_form(j, s);
  Matrix2 m;
  m.m11 = inner(sf.sigma_11, xi, s) / q;
  m.m12 = inner(sf.sigma_12, xi, s) / q;
  m.m21 = m.m12;
  m.m22 = inner(sf.sigma_22, xi, s) / q;
  return m;
}

GeometricFrame geometric_frame(const SurfaceJet& j, Signature s, double tol) {
  return build_frame(j, s, tol).frame;
}

double mu_magnitude(const SurfaceJet& j, Signature s, double tol) {
  return build_frame(j, s, tol).mu_abs;
}

FramePoint frame_point(const SurfaceMap& m, double u, double v, double h) {
  if (!(h > 0.0)) {
    fail(ErrorKind::config_error, "frame stencil step must be positive");
  }
  const Signature s = m.signature();
  const double jet_h = m.has_analytic_jet() ? 0.0 : h;
  const SurfaceJet j0 = eval_jet(m, u, v, 2, jet_h);
  const FrameData fd = build_frame(j0, s, 1e-9);

  FramePoint out;
  out.frame = fd.frame;
  out.form = fd.tb.form;
  out.H = fd.H;
  tangent_components(out.frame.x, j0, fd.tb.form, s, out.xu, out.xv);
  tangent_components(out.frame.y, j0, fd.tb.form, s, out.yu, out.yv);

  GeometricFunctions& fn = out.fn;
  const int eb = out.frame.eps_b;
  const int el = out.frame.eps_l;
  const double c = fd.cos_theta, t = fd.sin_theta;
  const Vector4 sxx = sigma_xx(fd.sf, c, t);
  const Vector4 syy = sigma_xx(fd.sf, -t, c);
  const Vector4 sxy = sigma_xy(fd.sf, c, t);
  fn.nu1 = eb * inner(sxx, out.frame.b, s);
  fn.nu2 = eb * inner(syy, out.frame.b, s);
  fn.lambda = eb * inner(sxy, out.frame.b, s);
  fn.mu = el * inner(sxy, out.frame.l, s);

  // Frame field derivatives: frames at the four stencil points, each
  // gauge-aligned to the center frame, then central differences.
  GeometricFrame fpu = align_gauge(build_frame(eval_jet(m, u + h, v, 2, jet_h), s, 1e-9).frame,
                                   out.frame);
  GeometricFrame fmu = align_gauge(build_frame(eval_jet(m, u - h, v, 2, jet_h), s, 1e-9).frame,
                                   out.frame);
  GeometricFrame fpv = align_gauge(build_frame(eval_jet(m, u, v + h, 2, jet_h), s, 1e-9).frame,
                                   out.frame);
  GeometricFrame fmv = align_gauge(build_frame(eval_jet(m, u, v - h, 2, jet_h), s, 1e-9).frame,
                                   out.frame);
  const double inv2h = 1.0 / (2.0 * h);
  const Vector4 x_u = inv2h * (fpu.x - fmu.x);
  const Vector4 x_v = inv2h * (fpv.x - fmv.x);
  const Vector4 b_u = inv2h * (fpu.b - fmu.b);
  const Vector4 b_v = inv2h * (fpv.b - fmv.b);

  const Vector4 dx_x = out.xu * x_u + out.xv * x_v;  // covariant derivative of x along x
  const Vector4 dy_y = out.yu * (inv2h * (fpu.y - fmu.y)) + out.yv * (inv2h * (fpv.y - fmv.y));
  const Vector4 dx_b = out.xu * b_u + out.xv * b_v;
  const Vector4 dy_b = out.yu * b_u + out.yv * b_v;

  fn.gamma1 = inner(dx_x, out.frame.y, s);
  fn.gamma2 = inner(dy_y, out.frame.x, s);
  fn.beta1 = el * inner(dx_b, out.frame.l, s);
  fn.beta2 = el * inner(dy_b, out.frame.l, s);
  return out;
}

GeometricFunctions geometric_functions(const SurfaceMap& m, double u, double v, double h) {
  return frame_point(m, u, v, h).fn;
}

InvariantGrids invariant_grids(const SurfaceMap& m, const ParamDomain& d, double h) {
  d.validate();
  if (!(h > 0.0)) {
    fail(ErrorKind::config_error, "stencil step must be positive");
  }
  InvariantGrids out;
  out.geom = GridGeometry::from_domain(d);
  for (GridField* f : {&out.E, &out.F, &out.G, &out.h_norm, &out.gamma1, &out.gamma2, &out.nu1,
                       &out.nu2, &out.lambda, &out.mu, &out.beta1, &out.beta2, &out.xu, &out.xv,
                       &out.yu, &out.yv}) {
    *f = GridField(out.geom);
  }
  std::vector<signed char> node_eps_b(out.geom.count());
  parallel_for(out.geom.count(), [&](int idx) {
    const std::size_t k = static_cast<std::size_t>(idx);
    const int i = idx / d.n_v;
    const int jj = idx % d.n_v;
    const FramePoint fp = frame_point(m, d.u(i), d.v(jj), h);
    node_eps_b[k] = static_cast<signed char>(fp.frame.eps_b);
    out.E.values[k] = fp.form.E;
    out.F.values[k] = fp.form.F;
    out.G.values[k] = fp.form.G;
    out.h_norm.values[k] = std::sqrt(std::abs(inner(fp.H, fp.H, m.signature())));
    out.gamma1.values[k] = fp.fn.gamma1;
    out.gamma2.values[k] = fp.fn.gamma2;
    out.nu1.values[k] = fp.fn.nu1;
    out.nu2.values[k] = fp.fn.nu2;
    out.lambda.values[k] = fp.fn.lambda;
    out.mu.values[k] = fp.fn.mu;
    out.beta1.values[k] = fp.fn.beta1;
    out.beta2.values[k] = fp.fn.beta2;
    out.xu.values[k] = fp.xu;
    out.xv.values[k] = fp.xv;
    out.yu.values[k] = fp.yu;
    out.yv.values[k] = fp.yv;
  });
  for (signed char e : node_eps_b) {
    if (e != node_eps_b[0]) {
      fail(ErrorKind::domain_violation,
           "mean-curvature direction changes causal character across the grid");
    }
  }
  out.eps_b = node_eps_b[0];
  out.eps_l = m.signature() == Signature::euclidean() ? 1 : -out.eps_b;
  return out;
}

PnmcClassification classify_pnmc(const SurfaceMap& m, const ParamDomain& d, double tol_beta,
                                 double tol_const, double h, double tol_minimal) {
  d.validate();
  if (h <= 0.0) {
    h = default_fd_step(d);
  }
  const Signature s = m.signature();
  const double jet_h = m.has_analytic_jet() ? 0.0 : h;

  PnmcClassification out;
  const int n = d.n_u * d.n_v;
  std::vector<int> minimal(static_cast<std::size_t>(n), 0);
  std::vector<double> beta_sup(minimal.size(), 0.0);
  std::vector<double> nu_sum(minimal.size(), std::numeric_limits<double>::quiet_NaN());
  parallel_for(n, [&](int idx) {
    const std::size_t k = static_cast<std::size_t>(idx);
    const double u = d.u(idx / d.n_v);
    const double v = d.v(idx % d.n_v);
    const SurfaceJet j0 = eval_jet(m, u, v, 2, jet_h);
    const Vector4 H = mean_curvature(j0, s);
    if (euclidean_norm(H) <= tol_minimal) {
      minimal[k] = 1;
      return;
    }
    const FramePoint fp = frame_point(m, u, v, h);
    beta_sup[k] = std::max(std::abs(fp.fn.beta1), std::abs(fp.fn.beta2));
    nu_sum[k] = fp.fn.nu1 + fp.fn.nu2;
  });

  out.minimal_nodes = 0;
  for (int flag : minimal) out.minimal_nodes += flag;
  if (out.minimal_nodes > 0) {
    out.tag = PnmcTag::minimal_point;
    return out;
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < nu_sum.size(); ++i) {
    out.sup_beta = std::max(out.sup_beta, beta_sup[i]);
    lo = std::min(lo, nu_sum[i]);
    hi = std::max(hi, nu_sum[i]);
  }
  out.nu_sum_variation = hi - lo;
  if (out.sup_beta <= tol_beta) {
    out.tag = out.nu_sum_variation <= tol_const ? PnmcTag::parallel_H
                                                : PnmcTag::pnmc_nonparallel_H;
  } else {
    out.tag = PnmcTag::generic;
  }
  return out;
}

IntegrabilityReport integrability_residual(const InvariantGrids& g, bool reduced) {
  const GridGeometry& geom = g.geom;
  if (geom.n_u < 3 || geom.n_v < 3) {
    fail(ErrorKind::grid_too_small, "integrability residual needs at least a 3x3 grid");
  }
  struct Pair {
    GridField du, dv;
  };
  const auto grad = [](const GridField& f) { return Pair{d_du(f), d_dv(f)}; };
  const Pair dmu = grad(g.mu);
  const Pair dlam = grad(g.lambda);
  const Pair dnu1 = grad(g.nu1);
  const Pair dnu2 = grad(g.nu2);
  const Pair dg1 = grad(g.gamma1);
  const Pair dg2 = grad(g.gamma2);
  const Pair db1 = grad(g.beta1);
  const Pair db2 = grad(g.beta2);

  std::array<GridField, 6> res;
  for (auto& f : res) {
    f.geom = geom;
    f.values.assign(geom.count(), std::numeric_limits<double>::quiet_NaN());
  }
  for (int i = 1; i + 1 < geom.n_u; ++i) {
    for (int j = 1; j + 1 < geom.n_v; ++j) {
      const std::size_t k = geom.idx(i, j);
      const double xu = g.xu.values[k], xv = g.xv.values[k];
      const double yu = g.yu.values[k], yv = g.yv.values[k];
      const auto dx = [&](const Pair& p) { return xu * p.du.values[k] + xv * p.dv.values[k]; };
      const auto dy = [&](const Pair& p) { return yu * p.du.values[k] + yv * p.dv.values[k]; };
      const double g1 = g.gamma1.values[k], g2 = g.gamma2.values[k];
      const double n1 = g.nu1.values[k], n2 = g.nu2.values[k];
      const double lam = g.lambda.values[k], mu = g.mu.values[k];
      const double b1 = reduced ? 0.0 : g.beta1.values[k];
      const double b2 = reduced ? 0.0 : g.beta2.values[k];
      // Signs follow the normal-frame metric: eb = <b,b>, el = <l,l>.
      const double eb = g.eps_b, el = g.eps_l;
      res[0].values[k] = 2.0 * mu * g2 + n1 * b2 - lam * b1 - dx(dmu);
      res[1].values[k] = 2.0 * mu * g1 - lam * b2 + n2 * b1 - dy(dmu);
      res[2].values[k] =
          2.0 * lam * g2 + eb * el * mu * b1 - (n1 - n2) * g1 - dx(dlam) + dy(dnu1);
      res[3].values[k] =
          2.0 * lam * g1 + eb * el * mu * b2 + (n1 - n2) * g2 + dx(dnu2) - dy(dlam);
      res[4].values[k] = reduced ? eb * (n1 - n2) * mu
                                 : g1 * b1 - g2 * b2 + eb * (n1 - n2) * mu + dx(db2) - dy(db1);
      res[5].values[k] = eb * (n1 * n2 - lam * lam) - el * mu * mu - dx(dg2) - dy(dg1) +
                         g1 * g1 + g2 * g2;
    }
  }
  IntegrabilityReport rep;
  for (int e = 0; e < 6; ++e) {
    rep.sup[e] = sup_norm(res[e], 1);
    rep.rms[e] = rms_norm(res[e], 1);
  }
  return rep;
}

IntegrabilityReport integrability_residual(const SurfaceMap& m, const ParamDomain& d, double h,
                                           bool reduced) {
  if (h <= 0.0) {
    h = default_fd_step(d);
  }
  return integrability_residual(invariant_grids(m, d, h), reduced);
}

}  // namespace pnmc
