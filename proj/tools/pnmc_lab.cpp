// pnmc-lab: command-line driver for the surface-invariant toolkit.
//
// Subcommands cover the full pipeline: sampling invariants of the built-in
// rotational surfaces, classifying the mean-curvature direction, verifying
// canonical charts, checking the canonical-parameter residual systems,
// dumping surfaces, reconstructing them from field data, and the full
// round-trip check. Identical configuration produces byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pnmc/canonical.hpp"
#include "pnmc/errors.hpp"
#include "pnmc/frame_invariants.hpp"
#include "pnmc/grid_io.hpp"
#include "pnmc/meridian.hpp"
#include "pnmc/pde.hpp"
#include "pnmc/reconstruct.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();
constexpr int kEpsUnset = 2;
constexpr double kCurveStep = 1e-3;

struct Options {
  std::string config;
  std::string family = "euclidean";
  std::string kappa = "constant:1";
  std::string out = "pnmc-out";
  std::string fields_csv;
  double umin = kUnset, umax = kUnset, vmin = kUnset, vmax = kUnset;
  int n_u = 0, n_v = 0;
  int epsilon = kEpsUnset;
  double h = 0.0;
  double tol_beta = 1e-6;
};

/// Configuration rejected before any file is created.
struct ValidationError {
  std::string message;
};

[[noreturn]] void reject(const std::string& message) { throw ValidationError{message}; }

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    try {
      std::size_t used = 0;
      out.push_back(std::stod(s.substr(pos, comma - pos), &used));
      if (used != comma - pos) reject("bad number in '" + s + "'");
    } catch (const std::exception&) {
      reject("bad number in '" + s + "'");
    }
    pos = comma + 1;
  }
  return out;
}

pnmc::CurvatureProfile parse_kappa(const std::string& spec) {
  const std::size_t colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto need = [&](std::size_t n) {
    auto xs = parse_numbers(args);
    if (xs.size() != n) {
      reject("kappa preset '" + name + "' needs " + std::to_string(n) + " numbers");
    }
    return xs;
  };
  if (name == "constant") return pnmc::CurvatureProfile::constant(need(1)[0]);
  if (name == "linear") {
    auto a = need(2);
    return pnmc::CurvatureProfile::linear(a[0], a[1]);
  }
  if (name == "sinusoid") {
    auto a = need(4);
    return pnmc::CurvatureProfile::sinusoid(a[0], a[1], a[2], a[3]);
  }
  if (name == "polynomial") {
    if (args.empty()) reject("kappa preset 'polynomial' needs coefficients");
    return pnmc::CurvatureProfile::polynomial(parse_numbers(args));
  }
  reject("unknown kappa preset '" + name +
         "' (use constant | linear | sinusoid | polynomial)");
}

enum class DomainKind { native, canonical };

struct Validated {
  pnmc::MeridianFamily family;
  pnmc::CurvatureProfile kappa;
  std::string family_str, kappa_str, fields_csv;
  double umin, umax, vmin, vmax;
  int n_u, n_v;
  int epsilon;  // resolved: 0 definite, otherwise +1/-1
  double h;
  double tol_beta;
  fs::path out;

  pnmc::ParamDomain domain() const { return {umin, umax, vmin, vmax, n_u, n_v}; }
  pnmc::GridGeometry grid() const { return pnmc::GridGeometry::from_domain(domain()); }
};

Validated validate(const Options& o, DomainKind kind, int default_n) {
  Validated v;
  if (o.family == "euclidean") {
    v.family = pnmc::MeridianFamily::euclidean;
  } else if (o.family == "parabolic") {
    v.family = pnmc::MeridianFamily::parabolic;
  } else {
    reject("unknown family '" + o.family + "' (use euclidean | parabolic)");
  }
  v.family_str = o.family;
  v.kappa = parse_kappa(o.kappa);
  v.kappa_str = o.kappa;
  v.fields_csv = o.fields_csv;

  const bool euclid = v.family == pnmc::MeridianFamily::euclidean;
  if (kind == DomainKind::native) {
    v.umin = std::isnan(o.umin) ? 0.0 : o.umin;
    v.umax = std::isnan(o.umax) ? 2.0 : o.umax;
    v.vmin = std::isnan(o.vmin) ? 0.0 : o.vmin;
    v.vmax = std::isnan(o.vmax) ? 2.0 : o.vmax;
  } else {
    v.umin = std::isnan(o.umin) ? (euclid ? 1.7 : 1.5) : o.umin;
    v.umax = std::isnan(o.umax) ? (euclid ? 2.3 : 2.5) : o.umax;
    v.vmin = std::isnan(o.vmin) ? (euclid ? -1.3 : -0.5) : o.vmin;
    v.vmax = std::isnan(o.vmax) ? (euclid ? -0.7 : 0.5) : o.vmax;
  }
  if (!(std::isfinite(v.umin) && std::isfinite(v.umax) && std::isfinite(v.vmin) &&
        std::isfinite(v.vmax)) ||
      !(v.umin < v.umax) || !(v.vmin < v.vmax)) {
    reject("domain must satisfy umin < umax and vmin < vmax");
  }
  if (!euclid && kind == DomainKind::native && v.umin <= -1.0) {
    reject("the parabolic profile needs umin > -1");
  }
  if (!euclid && kind == DomainKind::canonical && v.umin <= v.vmax) {
    reject("parabolic canonical coordinates need umin > vmax (positive diagonal gap)");
  }

  v.n_u = o.n_u > 0 ? o.n_u : default_n;
  v.n_v = o.n_v > 0 ? o.n_v : default_n;
  if (v.n_u < 3 || v.n_v < 3) reject("grid needs at least 3 nodes per axis");

  if (o.epsilon == kEpsUnset) {
    v.epsilon = euclid ? 0 : 1;
  } else if (o.epsilon == 1 || o.epsilon == -1) {
    v.epsilon = o.epsilon;
  } else {
    reject("epsilon must be +1 or -1");
  }
  if (euclid && v.epsilon != 0 && o.epsilon != kEpsUnset) {
    reject("epsilon applies only to the parabolic (indefinite-metric) family");
  }

  if (!(o.h >= 0.0) || !std::isfinite(o.h)) reject("h must be a nonnegative number");
  v.h = o.h;
  if (!(o.tol_beta > 0.0)) reject("tol-beta must be positive");
  v.tol_beta = o.tol_beta;
  if (o.out.empty()) reject("output directory must not be empty");
  v.out = fs::path(o.out);
  return v;
}

struct BuiltSurface {
  pnmc::SurfaceMap map;
  double curve_drift = 0.0;
};

BuiltSurface build_surface(const Validated& v) {
  const double pad = 0.1 + 10.0 * kCurveStep;
  const double lo = std::min(v.vmin - pad, 0.0);
  const double hi = std::max(v.vmax + pad, 0.0);
  auto curve = std::make_shared<pnmc::DirectrixCurve>(
      v.family == pnmc::MeridianFamily::euclidean
          ? pnmc::spherical_curve(v.kappa, lo, hi, kCurveStep)
          : pnmc::paraboloid_curve(v.kappa, lo, hi, kCurveStep));
  const double drift = curve->drift();
  return {pnmc::meridian_surface(v.family, std::move(curve),
                                 pnmc::MeridianProfile::standard(v.family)),
          drift};
}

ordered_json domain_json(const Validated& v) {
  return ordered_json{{"umin", v.umin}, {"umax", v.umax}, {"vmin", v.vmin}, {"vmax", v.vmax}};
}

ordered_json grid_json(const pnmc::GridGeometry& g) {
  return ordered_json{{"n_u", g.n_u}, {"n_v", g.n_v}, {"u0", g.u0},
                      {"v0", g.v0},   {"h_u", g.h_u}, {"h_v", g.h_v}};
}

ordered_json base_meta(const char* command, const Validated& v) {
  return ordered_json{{"command", command},
                      {"family", v.family_str},
                      {"kappa", v.kappa_str},
                      {"domain", domain_json(v)}};
}

void run_invariants(const Validated& v) {
  BuiltSurface s = build_surface(v);
  const pnmc::ParamDomain d = v.domain();
  const double step = v.h > 0.0 ? v.h : pnmc::default_fd_step(d);
  pnmc::InvariantGrids ig = pnmc::invariant_grids(s.map, d, step);
  pnmc::GridField nu(ig.geom);
  for (std::size_t k = 0; k < nu.values.size(); ++k) {
    nu.values[k] = 0.5 * (ig.nu1.values[k] + ig.nu2.values[k]);
  }
  pnmc::write_grid_csv(v.out / "invariants.csv", ig.geom,
                       {{"E", &ig.E},
                        {"F", &ig.F},
                        {"G", &ig.G},
                        {"lambda", &ig.lambda},
                        {"mu", &ig.mu},
                        {"nu", &nu},
                        {"beta1", &ig.beta1},
                        {"beta2", &ig.beta2}});
  ordered_json meta = base_meta("invariants", v);
  meta["grid"] = grid_json(ig.geom);
  meta["fd_step"] = step;
  meta["curve_step"] = kCurveStep;
  meta["curve_drift"] = s.curve_drift;
  meta["quantities"] = ordered_json{
      {"E,F,G", "first fundamental form coefficients"},
      {"lambda,mu,nu", "second fundamental form in the distinguished normal frame"},
      {"beta1,beta2", "normal connection forms; zero means the unit mean-curvature "
                      "direction is parallel"}};
  pnmc::write_json(v.out / "invariants.json", meta);
}

void run_classify(const Validated& v) {
  BuiltSurface s = build_surface(v);
  const pnmc::ParamDomain d = v.domain();
  const pnmc::PnmcClassification c =
      pnmc::classify_pnmc(s.map, d, v.tol_beta, 1e-8, v.h);
  ordered_json meta = base_meta("classify", v);
  meta["grid"] = grid_json(pnmc::GridGeometry::from_domain(d));
  meta["tol_beta"] = v.tol_beta;
  meta["tol_const"] = 1e-8;
  meta["tag"] = pnmc::to_string(c.tag);
  meta["sup_beta"] = c.sup_beta;
  meta["nu_sum_variation"] = c.nu_sum_variation;
  meta["minimal_nodes"] = c.minimal_nodes;
  pnmc::write_json(v.out / "classification.json", meta);
}

/// Largest axis-aligned box inside the image of the native rectangle under
/// the rotated chart, shrunk for finite-difference margins.
pnmc::ParamDomain chart_window(const Validated& v) {
  auto gap = [&](double u) {
    if (v.family == pnmc::MeridianFamily::euclidean) {
      const double w = std::sqrt(u * u + 2.0 * u + 5.0);
      return 2.0 * std::log(u + 1.0 + w);
    }
    return 2.0 * std::sqrt(u + 1.0);
  };
  const double scale_v = v.family == pnmc::MeridianFamily::euclidean ? 2.0 : 1.0;
  const double a0 = gap(v.umin), a1 = gap(v.umax);
  const double b0 = scale_v * v.vmin, b1 = scale_v * v.vmax;
  const double ac = 0.5 * (0.5 * (a0 + a1) + 0.5 * (b0 + b1));
  const double bc = 0.5 * (0.5 * (b0 + b1) - 0.5 * (a0 + a1));
  const double d = 0.9 * std::min(a1 - a0, b1 - b0) / 4.0;
  return {ac - d, ac + d, bc - d, bc + d, v.n_u, v.n_v};
}

void run_canonical(const Validated& v) {
  BuiltSurface s = build_surface(v);
  const pnmc::ParamDomain d = v.domain();
  const double native_res = pnmc::canonicity_residual(s.map, d);

  const pnmc::Reparametrization chart = pnmc::meridian_canonical_chart(v.family);
  const pnmc::SurfaceMap composed = pnmc::composed_surface(s.map, chart);
  const pnmc::ParamDomain window = chart_window(v);
  const double chart_res = pnmc::canonicity_residual(composed, window, 1e-3);

  const pnmc::SeparableFactors factors = pnmc::separable_factors(s.map, d);
  auto [integral_map, rep] = pnmc::reparametrize_integral(
      s.map, factors, {0.5 * (v.umin + v.umax), 0.5 * (v.vmin + v.vmax)});
  const auto c0 = rep.forward(v.umin, v.vmin);
  const auto c1 = rep.forward(v.umax, v.vmax);
  const double mu = 0.05 * (c1[0] - c0[0]), mv = 0.05 * (c1[1] - c0[1]);
  const pnmc::ParamDomain iwin{c0[0] + mu, c1[0] - mu, c0[1] + mv, c1[1] - mv, v.n_u, v.n_v};
  const double integral_res = pnmc::canonicity_residual(integral_map, iwin, 1e-3);

  ordered_json meta = base_meta("canonical", v);
  meta["native_residual"] = native_res;
  meta["chart_residual"] = chart_res;
  meta["chart_window"] = ordered_json{{"umin", window.u_min},
                                      {"umax", window.u_max},
                                      {"vmin", window.v_min},
                                      {"vmax", window.v_max}};
  meta["integral_residual"] = integral_res;
  meta["integral_window"] = ordered_json{{"umin", iwin.u_min},
                                         {"umax", iwin.u_max},
                                         {"vmin", iwin.v_min},
                                         {"vmax", iwin.v_max}};
  meta["separability_error"] = factors.separability_error;
  meta["residual_definition"] =
      "sup of max(|E - 1/|mu||, |F|, |G - 1/|mu||) / (1/|mu|) over the window";
  pnmc::write_json(v.out / "canonical.json", meta);
}

void run_residuals(const Validated& v) {
  pnmc::GridGeometry g;
  pnmc::GridField lam, mu, nu;
  std::string source;
  if (!v.fields_csv.empty()) {
    pnmc::GridCsv in = pnmc::read_grid_csv(v.fields_csv);
    g = in.geom;
    lam = in.column("lambda");
    mu = in.column("mu");
    nu = in.column("nu");
    source = "file";
  } else {
    pnmc::ParamDomain d = v.domain();
    if (v.h > 0.0) {
      d.n_u = static_cast<int>(std::lround((v.umax - v.umin) / v.h)) + 1;
      d.n_v = static_cast<int>(std::lround((v.vmax - v.vmin) / v.h)) + 1;
      if (d.n_u < 3 || d.n_v < 3) reject("grid spacing h leaves fewer than 3 nodes");
    }
    g = pnmc::GridGeometry::from_domain(d);
    pnmc::SolutionFields s = pnmc::model_solution(v.family, v.kappa.value, g);
    lam = std::move(s.lam);
    mu = std::move(s.mu);
    nu = std::move(s.nu);
    source = "model";
  }

  const bool definite = v.epsilon == 0;
  const pnmc::ResidualReport rep =
      definite ? pnmc::residual_euclidean(lam, mu, nu)
               : pnmc::residual_minkowski(lam, mu, nu, v.epsilon);

  pnmc::write_grid_csv(v.out / "solution_fields.csv", g,
                       {{"lambda", &lam}, {"mu", &mu}, {"nu", &nu}});
  ordered_json meta = base_meta("residuals", v);
  meta["source"] = source;
  meta["grid"] = grid_json(g);
  if (definite) {
    meta["metric"] = "definite";
  } else {
    meta["metric"] = "indefinite";
    meta["epsilon"] = rep.epsilon;
  }
  meta["excluded_nodes"] = rep.excluded;
  const char* names[3] = {"r1", "r2", "r3"};
  for (int k = 0; k < 3; ++k) {
    meta[names[k]] = ordered_json{{"sup", rep.sup[static_cast<std::size_t>(k)]},
                                  {"rms", rep.rms[static_cast<std::size_t>(k)]}};
  }
  meta["system"] =
      "canonical-parameter compatibility equations for a parallel unit "
      "mean-curvature direction";
  pnmc::write_json(v.out / "residuals.json", meta);
}

void run_meridian(const Validated& v) {
  BuiltSurface s = build_surface(v);
  const pnmc::GridGeometry g = v.grid();
  pnmc::GridField z0(g), z1(g), z2(g), z3(g);
  for (int i = 0; i < g.n_u; ++i) {
    for (int j = 0; j < g.n_v; ++j) {
      const pnmc::Vector4 p = s.map.position(g.u(i), g.v(j));
      z0.at(i, j) = p[0];
      z1.at(i, j) = p[1];
      z2.at(i, j) = p[2];
      z3.at(i, j) = p[3];
    }
  }
  pnmc::write_grid_csv(v.out / "surface.csv", g,
                       {{"z0", &z0}, {"z1", &z1}, {"z2", &z2}, {"z3", &z3}});
  ordered_json meta = base_meta("meridian", v);
  meta["grid"] = grid_json(g);
  meta["signature"] =
      v.family == pnmc::MeridianFamily::euclidean ? "euclidean" : "minkowski";
  meta["curve_step"] = kCurveStep;
  meta["curve_drift"] = s.curve_drift;
  pnmc::write_json(v.out / "surface.json", meta);
}

void run_reconstruct(const Validated& v) {
  const pnmc::CanonicalFieldSet fields = pnmc::model_field_set(v.family, v.kappa.value);
  const pnmc::GridGeometry g = v.grid();
  pnmc::IntegrateOptions opts;
  if (v.h > 0.0) opts.fd_step = v.h;
  const pnmc::FrameGrid fg = pnmc::integrate_surface(
      fields, pnmc::default_initial_frame(fields.epsilon), g, opts);
  pnmc::GridField z0(g), z1(g), z2(g), z3(g);
  for (int i = 0; i < g.n_u; ++i) {
    for (int j = 0; j < g.n_v; ++j) {
      const pnmc::Vector4& p = fg.at(i, j).z;
      z0.at(i, j) = p[0];
      z1.at(i, j) = p[1];
      z2.at(i, j) = p[2];
      z3.at(i, j) = p[3];
    }
  }
  pnmc::write_grid_csv(v.out / "reconstructed.csv", g,
                       {{"z0", &z0}, {"z1", &z1}, {"z2", &z2}, {"z3", &z3}});
  ordered_json meta = base_meta("reconstruct", v);
  meta["grid"] = grid_json(g);
  meta["epsilon"] = fields.epsilon;
  meta["max_drift"] = fg.max_drift;
  meta["initial_frame"] = "coordinate axes at the origin";
  pnmc::write_json(v.out / "reconstructed.json", meta);
}

void run_roundtrip(const Validated& v) {
  const pnmc::CanonicalFieldSet fields = pnmc::model_field_set(v.family, v.kappa.value);
  const pnmc::GridGeometry g = v.grid();
  pnmc::IntegrateOptions opts;
  if (v.h > 0.0) opts.fd_step = v.h;
  const pnmc::RoundtripReport rep = pnmc::roundtrip(fields, g, opts);
  const double defect = pnmc::compatibility_defect(
      fields, pnmc::default_initial_frame(fields.epsilon), g, opts);
  ordered_json meta = base_meta("roundtrip", v);
  meta["grid"] = grid_json(g);
  meta["epsilon"] = fields.epsilon;
  meta["sup_lambda"] = rep.sup_lam;
  meta["sup_mu"] = rep.sup_mu;
  meta["sup_nu"] = rep.sup_nu;
  meta["max_drift"] = rep.drift;
  meta["compatibility_defect"] = defect;
  meta["comparison"] =
      "reconstructed surface re-measured by finite-difference jets against "
      "the input fields (|lambda|, |mu|, nu), sup over interior nodes";
  pnmc::write_json(v.out / "roundtrip.json", meta);
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON config file; explicit flags win");
  sub->add_option("--family", o.family, "Surface family: euclidean | parabolic");
  sub->add_option("--kappa", o.kappa,
                  "Directrix curvature: constant:c | linear:a,b | "
                  "sinusoid:a,b,omega,phase | polynomial:c0,c1,...");
  sub->add_option("--umin", o.umin, "Domain lower u bound");
  sub->add_option("--umax", o.umax, "Domain upper u bound");
  sub->add_option("--vmin", o.vmin, "Domain lower v bound");
  sub->add_option("--vmax", o.vmax, "Domain upper v bound");
  sub->add_option("--nu", o.n_u, "Grid nodes along u");
  sub->add_option("--nv", o.n_v, "Grid nodes along v");
  sub->add_option("--epsilon", o.epsilon,
                  "Sign of <H,H> for the indefinite metric: +1 or -1");
  sub->add_option("--h", o.h,
                  "Step parameter: frame stencil step (invariants/classify), "
                  "grid spacing (residuals), derivative step (reconstruct/roundtrip)");
  sub->add_option("--tol-beta", o.tol_beta, "Classification threshold on sup|beta|");
  sub->add_option("--out", o.out, "Output directory");
}

void merge_config(const CLI::App* sub, Options& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) reject("cannot open config file " + o.config);
  ordered_json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& e) {
    reject(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) reject("config file must hold a JSON object");

  auto flag_given = [&](const char* flag) {
    try {
      return sub->count(flag) > 0;
    } catch (const std::exception&) {
      return false;  // option not offered by this subcommand; config value applies
    }
  };
  auto take = [&](const char* key, const char* flag, auto& field) {
    if (cfg.contains(key) && !flag_given(flag)) {
      try {
        field = cfg.at(key).get<std::decay_t<decltype(field)>>();
      } catch (const std::exception&) {
        reject(std::string("config key '") + key + "' has the wrong type");
      }
    }
  };
  take("family", "--family", o.family);
  take("kappa", "--kappa", o.kappa);
  take("out", "--out", o.out);
  take("fields", "--fields", o.fields_csv);
  take("umin", "--umin", o.umin);
  take("umax", "--umax", o.umax);
  take("vmin", "--vmin", o.vmin);
  take("vmax", "--vmax", o.vmax);
  take("nu", "--nu", o.n_u);
  take("nv", "--nv", o.n_v);
  take("epsilon", "--epsilon", o.epsilon);
  take("h", "--h", o.h);
  take("tol_beta", "--tol-beta", o.tol_beta);
  for (const auto& [key, value] : cfg.items()) {
    (void)value;
    static const char* known[] = {"family", "kappa", "out",     "fields", "umin",
                                  "umax",   "vmin",  "vmax",    "nu",     "nv",
                                  "epsilon", "h",    "tol_beta"};
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known)) {
      reject("unknown config key '" + key + "'");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Surface invariants, canonical parameters, and moving-frame "
               "reconstruction for rotational surfaces in four dimensions"};
  app.set_help_flag("--help", "Print help and exit");
  app.require_subcommand(1);
  Options o;

  struct Command {
    const char* name;
    const char* help;
    DomainKind kind;
    int default_n;
    void (*run)(const Validated&);
  };
  const Command commands[] = {
      {"invariants", "Sample E,F,G and the frame invariants over a grid", DomainKind::native,
       60, run_invariants},
      {"classify", "Decide how the mean-curvature direction behaves", DomainKind::native, 60,
       run_classify},
      {"canonical", "Verify canonical charts (closed form and integral route)",
       DomainKind::native, 24, run_canonical},
      {"residuals", "Evaluate the canonical-parameter residual system", DomainKind::canonical,
       61, run_residuals},
      {"meridian", "Dump positions of a built-in rotational surface", DomainKind::native, 60,
       run_meridian},
      {"reconstruct", "Integrate the moving-frame system for model fields",
       DomainKind::canonical, 50, run_reconstruct},
      {"roundtrip", "Reconstruct and re-measure the invariants", DomainKind::canonical, 50,
       run_roundtrip},
  };
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->set_help_flag("--help", "Print help and exit");
    add_common(sub, o);
    if (std::string(c.name) == "residuals") {
      sub->add_option("--fields", o.fields_csv,
                      "CSV with lambda/mu/nu columns to check instead of model fields");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* active = app.get_subcommands().front();
  const Command* cmd = nullptr;
  for (const Command& c : commands) {
    if (active->get_name() == c.name) cmd = &c;
  }

  try {
    merge_config(active, o);
    const Validated v = validate(o, cmd->kind, cmd->default_n);
    std::error_code ec;
    fs::create_directories(v.out, ec);
    if (ec) reject("cannot create output directory " + v.out.string());
    try {
      cmd->run(v);
    } catch (const pnmc::Error& e) {
      const ordered_json err{
          {"error", ordered_json{{"kind", pnmc::to_string(e.kind())}, {"message", e.what()}}}};
      std::cout << err.dump(2) << "\n";
      std::error_code ignore;
      if (fs::exists(v.out, ignore)) {
        try {
          pnmc::write_json(v.out / "error.json", err);
        } catch (...) {
        }
      }
      return 3;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.message << "\n";
    return 2;
  } catch (const pnmc::Error& e) {
    // Errors raised before dispatch (config reading) count as validation.
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    const ordered_json err{
        {"error", ordered_json{{"kind", "internal"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 3;
  }
  return 0;
}
