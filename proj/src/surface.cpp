#include "pnmc/surface.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace pnmc {

void ParamDomain::validate() const {
  if (!(u_min < u_max) || !(v_min < v_max)) {
    fail(ErrorKind::config_error, "parameter rectangle is empty");
  }
  if (n_u < 3 || n_v < 3) {
    fail(ErrorKind::grid_too_small, "grid needs at least 3 nodes per axis");
  }
}

SurfaceMap::SurfaceMap(Signature signature, PositionFn position)
    : signature_(signature), position_(std::move(position)) {}

SurfaceMap::SurfaceMap(Signature signature, PositionFn position, JetFn analytic_jet,
                       int analytic_order)
    : signature_(signature),
      position_(std::move(position)),
      jet_(std::move(analytic_jet)),
      analytic_order_(analytic_order) {}

namespace {

void check_fd_margin(const SurfaceMap& m, double u, double v, int order, double h) {
  if (!m.bounds()) return;
  const auto& b = *m.bounds();
  double margin = (order >= 3 ? 3.0 : 2.0) * h;
  if (u - margin < b.u_min || u + margin > b.u_max || v - margin < b.v_min ||
      v + margin > b.v_max) {
    fail(ErrorKind::out_of_domain,
         "finite-difference stencil leaves the chart bounds at (u,v)=(" + std::to_string(u) +
             "," + std::to_string(v) + ")");
  }
}

SurfaceJet fd_jet(const SurfaceMap& m, double u, double v, int order, double h) {
  check_fd_margin(m, u, v, order, h);

  SurfaceJet j;
  j.u = u;
  j.v = v;
  j.order = order;

  const Vector4 z = m.position(u, v);
  const Vector4 pu = m.position(u + h, v), mu = m.position(u - h, v);
  const Vector4 pv = m.position(u, v + h), mv = m.position(u, v - h);
  const Vector4 pp = m.position(u + h, v + h), pm = m.position(u + h, v - h);
  const Vector4 mp = m.position(u - h, v + h), mm = m.position(u - h, v - h);

  const double inv2h = 1.0 / (2.0 * h);
  const double invh2 = 1.0 / (h * h);

  j.z = z;
  j.z_u = (pu - mu) * inv2h;
  j.z_v = (pv - mv) * inv2h;
  j.z_uu = (pu - 2.0 * z + mu) * invh2;
  j.z_vv = (pv - 2.0 * z + mv) * invh2;
  j.z_uv = (pp - pm - mp + mm) * (0.25 * invh2);

  if (order >= 3) {
    const Vector4 p2u = m.position(u + 2.0 * h, v), m2u = m.position(u - 2.0 * h, v);
    const Vector4 p2v = m.position(u, v + 2.0 * h), m2v = m.position(u, v - 2.0 * h);
    const double inv2h3 = 1.0 / (2.0 * h * h * h);

    j.z_uuu = (p2u - 2.0 * pu + 2.0 * mu - m2u) * inv2h3;
    j.z_vvv = (p2v - 2.0 * pv + 2.0 * mv - m2v) * inv2h3;
    // d/dv of the z_uu stencil and d/du of the z_vv stencil.
    j.z_uuv = ((pp - 2.0 * pv + mp) - (pm - 2.0 * mv + mm)) * (invh2 * inv2h);
    j.z_uvv = ((pp - 2.0 * pu + pm) - (mp - 2.0 * mu + mm)) * (invh2 * inv2h);
  }
  return j;
}

}  // namespace

SurfaceJet eval_jet(const SurfaceMap& m, double u, double v, int order, double h) {
  if (order != 2 && order != 3) {
    fail(ErrorKind::config_error, "jet order must be 2 or 3");
  }
  if (m.bounds()) {
    const auto& b = *m.bounds();
    if (u < b.u_min || u > b.u_max || v < b.v_min || v > b.v_max) {
      fail(ErrorKind::out_of_domain, "jet request outside chart bounds");
    }
  }
  if (m.has_analytic_jet() && m.analytic_order() >= order) {
    SurfaceJet j = m.analytic_jet(u, v, order);
    j.u = u;
    j.v = v;
    j.order = order;
    return j;
  }
  if (!(h > 0.0)) {
    fail(ErrorKind::config_error, "finite-difference step must be positive");
  }
  return fd_jet(m, u, v, order, h);
}

FirstForm first_form(const SurfaceJet& j, Signature s) {
  FirstForm g;
  g.E = inner(j.z_u, j.z_u, s);
  g.F = inner(j.z_u, j.z_v, s);
  g.G = inner(j.z_v, j.z_v, s);
  if (!(g.E > 0.0) || !(g.det() > 0.0)) {
    fail(ErrorKind::not_spacelike, "induced metric is not positive definite");
  }
  return g;
}

double default_fd_step(const ParamDomain& d) {
  double hu = (d.u_max - d.u_min) / (8.0 * d.n_u);
  double hv = (d.v_max - d.v_min) / (8.0 * d.n_v);
  return std::min(hu, hv);
}

}  // namespace pnmc
