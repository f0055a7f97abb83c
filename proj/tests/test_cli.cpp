#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* binary() { return PNMC_LAB_BINARY; }

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

/// Runs the driver with stdout captured and stderr discarded.
RunResult run(const std::string& args) {
  const fs::path cap = fs::temp_directory_path() / "pnmc_cli_stdout.txt";
  const std::string cmd =
      std::string(binary()) + " " + args + " > " + cap.string() + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(cap);
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  int code = -1;
  if (WIFEXITED(raw)) code = WEXITSTATUS(raw);
  return {code, std::move(text)};
}

fs::path fresh_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "pnmc_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("classify labels the rotational surface with varying curvature") {
  const fs::path out = fresh_dir("classify");
  const RunResult r = run("classify --family euclidean --kappa sinusoid:1,0.3,1,0 --out " +
                          out.string());
  REQUIRE(r.exit_code == 0);
  const json c = load_json(out / "classification.json");
  CHECK(c.at("tag").get<std::string>() == "pnmc_nonparallel_H");
  CHECK(c.at("sup_beta").get<double>() < 1e-6);
  CHECK(c.at("nu_sum_variation").get<double>() > 1e-3);
}

TEST_CASE("residuals stay small for the model solution") {
  const fs::path out = fresh_dir("residuals");
  const RunResult r = run("residuals --family euclidean --h 0.01 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const json rep = load_json(out / "residuals.json");
  CHECK(rep.at("r1").at("sup").get<double>() < 1e-4);
  CHECK(rep.at("r2").at("sup").get<double>() < 1e-4);
  CHECK(rep.at("r3").at("sup").get<double>() < 1e-4);
  CHECK(rep.at("metric").get<std::string>() == "definite");
  CHECK(fs::exists(out / "solution_fields.csv"));
}

TEST_CASE("residuals accepts fields from a CSV file") {
  const fs::path out = fresh_dir("residuals_file");
  const fs::path gen = fresh_dir("residuals_gen");
  REQUIRE(run("residuals --family parabolic --nu 31 --nv 31 --out " + gen.string())
              .exit_code == 0);
  const RunResult r = run("residuals --family parabolic --fields " +
                          (gen / "solution_fields.csv").string() + " --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const json rep = load_json(out / "residuals.json");
  CHECK(rep.at("source").get<std::string>() == "file");
  CHECK(rep.at("metric").get<std::string>() == "indefinite");
  CHECK(rep.at("epsilon").get<int>() == 1);
  CHECK(rep.at("r1").at("sup").get<double>() < 1e-2);
}

TEST_CASE("invalid grid is rejected before any file is written") {
  const fs::path out = fresh_dir("rejected");
  const RunResult r = run("invariants --nu 2 --out " + out.string());
  CHECK(r.exit_code == 2);
  CHECK(!fs::exists(out));
}

TEST_CASE("unknown family and malformed kappa are rejected") {
  const fs::path out = fresh_dir("rejected2");
  CHECK(run("classify --family hyperbolic --out " + out.string()).exit_code == 2);
  CHECK(run("classify --kappa sinusoid:1,2 --out " + out.string()).exit_code == 2);
  CHECK(run("classify --kappa fourier:1 --out " + out.string()).exit_code == 2);
  CHECK(run("roundtrip --family parabolic --umin 0 --umax 1 --vmin 0 --vmax 1 --out " +
            out.string())
            .exit_code == 2);
  CHECK(!fs::exists(out));
  CHECK(run("").exit_code == 2);  // a subcommand is required
}

TEST_CASE("numerical failure reports a machine readable error") {
  const fs::path out = fresh_dir("numfail");
  const fs::path dir = fresh_dir("numfail_input");
  fs::create_directories(dir);
  // Fields whose mu vanishes everywhere cannot support the residual system.
  std::ofstream csv(dir / "dead.csv");
  csv << "# u v lambda mu nu\n";
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      csv << i << " " << j << " 1 0 1\n";
    }
  }
  csv.close();
  const RunResult r = run("residuals --fields " + (dir / "dead.csv").string() + " --out " +
                          out.string());
  CHECK(r.exit_code == 3);
  const json err = json::parse(r.stdout_text);
  CHECK(err.at("error").at("kind").get<std::string>() == "mu_vanishes");
  CHECK(fs::exists(out / "error.json"));
}

TEST_CASE("identical configuration produces byte identical outputs") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  const std::string args = "invariants --family parabolic --kappa linear:1,0.2 --nu 24 "
                           "--nv 20 --umin 0.5 --umax 1.5 ";
  REQUIRE(run(args + "--out " + a.string()).exit_code == 0);
  REQUIRE(run(args + "--out " + b.string()).exit_code == 0);
  CHECK(slurp(a / "invariants.csv") == slurp(b / "invariants.csv"));
  CHECK(slurp(a / "invariants.json") == slurp(b / "invariants.json"));
}

TEST_CASE("config file fills in values and explicit flags win") {
  const fs::path out = fresh_dir("config");
  const fs::path cfg = fresh_dir("config_in");
  fs::create_directories(cfg);
  {
    std::ofstream f(cfg / "run.json");
    f << R"({"family":"parabolic","kappa":"constant:2","nu":9,"nv":9})" << "\n";
  }
  const RunResult r = run("classify --config " + (cfg / "run.json").string() +
                          " --kappa constant:1 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const json c = load_json(out / "classification.json");
  CHECK(c.at("family").get<std::string>() == "parabolic");
  CHECK(c.at("kappa").get<std::string>() == "constant:1");
  CHECK(c.at("grid").at("n_u").get<int>() == 9);

  // Unknown keys and unreadable files are configuration errors.
  {
    std::ofstream f(cfg / "bad.json");
    f << R"({"famly":"parabolic"})" << "\n";
  }
  CHECK(run("classify --config " + (cfg / "bad.json").string() + " --out " + out.string())
            .exit_code == 2);
  CHECK(run("classify --config " + (cfg / "missing.json").string() + " --out " +
            out.string())
            .exit_code == 2);
}

TEST_CASE("reconstruct and roundtrip emit consistent reports") {
  const fs::path rec = fresh_dir("reconstruct");
  REQUIRE(run("reconstruct --family euclidean --nu 12 --nv 12 --out " + rec.string())
              .exit_code == 0);
  const json rj = load_json(rec / "reconstructed.json");
  CHECK(rj.at("max_drift").get<double>() < 1e-6);
  CHECK(fs::exists(rec / "reconstructed.csv"));

  const fs::path rt = fresh_dir("roundtrip");
  REQUIRE(run("roundtrip --family euclidean --nu 20 --nv 20 --out " + rt.string())
              .exit_code == 0);
  const json tj = load_json(rt / "roundtrip.json");
  CHECK(tj.at("sup_lambda").get<double>() < 1e-3);
  CHECK(tj.at("sup_mu").get<double>() < 1e-3);
  CHECK(tj.at("sup_nu").get<double>() < 1e-3);
  CHECK(tj.at("max_drift").get<double>() < 1e-6);
  CHECK(tj.at("compatibility_defect").get<double>() < 1e-4);
}

TEST_CASE("meridian dump covers the requested grid") {
  const fs::path out = fresh_dir("meridian");
  REQUIRE(run("meridian --family euclidean --nu 7 --nv 5 --out " + out.string())
              .exit_code == 0);
  const std::string csv = slurp(out / "surface.csv");
  CHECK(csv.rfind("# u v z0 z1 z2 z3", 0) == 0);
  int rows = 0;
  for (char ch : csv) rows += ch == '\n' ? 1 : 0;
  CHECK(rows == 1 + 7 * 5);
  const json meta = load_json(out / "surface.json");
  CHECK(meta.at("signature").get<std::string>() == "euclidean");
  CHECK(meta.at("curve_drift").get<double>() < 1e-6);
}
