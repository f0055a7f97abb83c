#include "pnmc/pde.hpp"

#include <cmath>
#include <limits>

#include "pnmc/errors.hpp"
#include "pnmc/reconstruct.hpp"

namespace pnmc {

namespace {

constexpr double kMuFloor = 1e-12;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_compatible(const GridField& a, const GridField& b, const char* what) {
  if (!a.geom.compatible(b.geom)) {
    fail(ErrorKind::grid_mismatch, std::string("residual fields disagree on grid geometry: ") + what);
  }
}

/// log|mu| with NaN at nodes where |mu| is below the floor, so every stencil
/// touching an excluded node drops out of the norms automatically.
GridField masked_log_abs(const GridField& mu, int& excluded) {
  GridField out(mu.geom);
  excluded = 0;
  for (std::size_t k = 0; k < mu.values.size(); ++k) {
    const double m = mu.values[k];
    if (!std::isfinite(m) || std::abs(m) < kMuFloor) {
      out.values[k] = kNaN;
      ++excluded;
    } else {
      out.values[k] = std::log(std::abs(m));
    }
  }
  return out;
}

ResidualReport assemble(const GridField& lam, const GridField& mu, const GridField& nu,
                        int eps) {
  require_compatible(lam, mu, "lam vs mu");
  require_compatible(lam, nu, "lam vs nu");
  const GridGeometry& g = lam.geom;
  if (g.n_u < 3 || g.n_v < 3) {
    fail(ErrorKind::grid_too_small, "residual evaluation needs at least a 3x3 grid");
  }

  ResidualReport rep;
  rep.epsilon = eps;
  GridField logmu = masked_log_abs(mu, rep.excluded);

  const GridField nu_u = d_du(nu), nu_v = d_dv(nu);
  const GridField lam_u = d_du(lam), lam_v = d_dv(lam);
  const GridField lm_u = d_du(logmu), lm_v = d_dv(logmu);
  const GridField lap = laplacian(logmu);

  GridField r1(g), r2(g), r3(g);
  for (int i = 0; i < g.n_u; ++i) {
    for (int j = 0; j < g.n_v; ++j) {
      const double l = lam.at(i, j), m = mu.at(i, j), n = nu.at(i, j);
      r1.at(i, j) = nu_u.at(i, j) - lam_v.at(i, j) + l * lm_v.at(i, j);
      r2.at(i, j) = nu_v.at(i, j) - lam_u.at(i, j) + l * lm_u.at(i, j);
      const double half_lap = 0.5 * std::abs(m) * lap.at(i, j);
      if (eps == 0) {
        r3.at(i, j) = n * n - l * l - m * m - half_lap;
      } else {
        r3.at(i, j) = eps * (n * n - l * l + m * m) - half_lap;
      }
    }
  }

  const int interior = (g.n_u - 2) * (g.n_v - 2);
  if (invalid_count(r3, 1) >= interior) {
    fail(ErrorKind::mu_vanishes, "no interior node has |mu| above the 1e-12 floor");
  }

  const GridField* rs[3] = {&r1, &r2, &r3};
  for (int k = 0; k < 3; ++k) {
    rep.sup[static_cast<std::size_t>(k)] = sup_norm(*rs[k], 1);
    rep.rms[static_cast<std::size_t>(k)] = rms_norm(*rs[k], 1);
  }
  return rep;
}

}  // namespace

GridField laplacian(const GridField& f) {
  const GridGeometry& g = f.geom;
  if (g.n_u < 3 || g.n_v < 3) {
    fail(ErrorKind::grid_too_small, "laplacian needs at least a 3x3 grid");
  }
  GridField out(g);
  const double wu = 1.0 / (g.h_u * g.h_u), wv = 1.0 / (g.h_v * g.h_v);
  for (int i = 0; i < g.n_u; ++i) {
    for (int j = 0; j < g.n_v; ++j) {
      if (i == 0 || j == 0 || i == g.n_u - 1 || j == g.n_v - 1) {
        out.at(i, j) = kNaN;
        continue;
      }
      const double c = f.at(i, j);
      out.at(i, j) = wu * (f.at(i + 1, j) + f.at(i - 1, j) - 2.0 * c) +
                     wv * (f.at(i, j + 1) + f.at(i, j - 1) - 2.0 * c);
    }
  }
  return out;
}

ResidualReport residual_euclidean(const GridField& lam, const GridField& mu,
                                  const GridField& nu) {
  return assemble(lam, mu, nu, 0);
}

ResidualReport residual_minkowski(const GridField& lam, const GridField& mu,
                                  const GridField& nu, int eps) {
  if (eps != 1 && eps != -1) {
    fail(ErrorKind::config_error, "epsilon must be +1 or -1");
  }
  return assemble(lam, mu, nu, eps);
}

SolutionFields model_solution(MeridianFamily family,
                              const std::function<double(double)>& kappa,
                              const GridGeometry& g) {
  const CanonicalFieldSet fields = model_field_set(family, kappa);
  SolutionFields out{GridField(g), GridField(g), GridField(g)};
  for (int i = 0; i < g.n_u; ++i) {
    for (int j = 0; j < g.n_v; ++j) {
      const double u = g.u(i), v = g.v(j);
      out.lam.at(i, j) = fields.lam(u, v);
      out.mu.at(i, j) = fields.mu(u, v);
      out.nu.at(i, j) = fields.nu(u, v);
    }
  }
  return out;
}

}  // namespace pnmc
