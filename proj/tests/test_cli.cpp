#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../src/cli/config.hpp"

namespace fs = std::filesystem;
using namespace kinlab::cli;

namespace {

fs::path scratch_dir() {
  static int counter = 0;
  fs::path p = fs::temp_directory_path() /
               ("kinlab_cli_test_" + std::to_string(++counter));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  fs::path p = dir / "config.json";
  std::ofstream f(p);
  f << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool has_error_containing(const ValidationResult& vr,
                          const std::string& needle) {
  for (const auto& e : vr.errors)
    if (e.find(needle) != std::string::npos)
      return true;
  return false;
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("minimal config resolves with all defaults materialized") {
  auto dir = scratch_dir();
  auto cfg = write_config(dir, R"({"experiment": "simulate"})");
  ValidationResult vr = validate_config(cfg.string());
  REQUIRE(vr.ok());
  CHECK(vr.resolved["grid"]["nx"] == 32);
  CHECK(vr.resolved["grid"]["nv"] == 32);
  CHECK(vr.resolved["grid"]["vmax"] == 8.0);
  CHECK(vr.resolved["profiles"]["chi2"]["sigma"] == 1.3);
  CHECK(vr.resolved["numerics"]["delta"] == 0.1);
  CHECK(vr.resolved["output"]["seed"] == 12345);
  CHECK(vr.hash.size() == 16);
}

TEST_CASE("validation names the offending fields") {
  auto dir = scratch_dir();

  auto odd = write_config(
      dir, R"({"experiment": "simulate", "grid": {"nx": 17}})");
  CHECK(has_error_containing(validate_config(odd.string()), "even"));

  auto gamma = write_config(dir, R"({
    "experiment": "simulate",
    "physics": {"initial": {"rho_inf": 1.0}, "gamma1": 1.5, "gamma2": 0.1}
  })");
  CHECK(has_error_containing(validate_config(gamma.string()),
                             "gamma1 must be < rho_inf"));

  auto unknown = write_config(
      dir, R"({"experiment": "simulate", "grid": {"nnx": 32}})");
  CHECK(has_error_containing(validate_config(unknown.string()), "grid.nnx"));

  auto badexp = write_config(dir, R"({"experiment": "flythemoon"})");
  CHECK(has_error_containing(validate_config(badexp.string()),
                             "unknown experiment"));

  auto mismatch = write_config(dir, R"({"experiment": "simulate"})");
  CHECK(has_error_containing(
      validate_config(mismatch.string(), std::string("limit-study")),
      "does not match"));
}

TEST_CASE("simulate experiment writes the documented CSV schema and passes") {
  auto dir = scratch_dir();
  auto cfg = write_config(dir, R"({
    "experiment": "simulate",
    "grid": {"nx": 8, "nv": 8, "vmax": 8.0},
    "physics": {"initial": {"kind": "cosine", "rho_inf": 1.0,
                            "amplitude": 0.05},
                "gamma1": 0.1, "gamma2": 0.1},
    "numerics": {"t_final": 0.2, "record_every": 4},
    "output": {"seed": 7}
  })");
  ValidationResult vr = validate_config(cfg.string());
  REQUIRE(vr.ok());
  const fs::path out = dir / "out";
  CHECK(run_experiment(vr, out.string()) == 0);

  const std::string csv = slurp(out / "simulate.csv");
  CHECK(csv.rfind("# config_hash=" + vr.hash, 0) == 0);
  CHECK(csv.find("t,mass_diff,rel_entropy,dissipation,env_min_f,env_max_f,"
                 "env_min_g,env_max_g\n") != std::string::npos);
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "resolved_config.json"));
  CHECK(slurp(out / "summary.json").find(vr.hash) != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
  auto dir = scratch_dir();
  auto cfg = write_config(dir, R"({
    "experiment": "coercivity-check",
    "grid": {"nx": 16, "nv": 16, "vmax": 8.0},
    "numerics": {"n_samples": 10},
    "output": {"seed": 99}
  })");
  ValidationResult vr = validate_config(cfg.string());
  REQUIRE(vr.ok());
  const fs::path out1 = dir / "a", out2 = dir / "b";
  const int rc1 = run_experiment(vr, out1.string());
  const int rc2 = run_experiment(vr, out2.string());
  CHECK(rc1 == 0);
  CHECK(rc2 == 0);
  for (const char* name :
       {"resolved_config.json", "report.txt", "summary.json"}) {
    CAPTURE(name);
    CHECK(slurp(out1 / name) == slurp(out2 / name));
    CHECK(!slurp(out1 / name).empty());
  }
  // the flat report carries the microscopic coercivity constant at rho = 1
  const std::string rep = slurp(out1 / "report.txt");
  const auto pos = rep.find("P1_lambda_m = ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(rep.substr(pos + 14)) >= 1.0 - 1e-6);
}

TEST_CASE("simulate from equilibrium keeps the entropy column at zero") {
  auto dir = scratch_dir();
  auto cfg = write_config(dir, R"({
    "experiment": "simulate",
    "grid": {"nx": 8, "nv": 8, "vmax": 8.0},
    "physics": {"initial": {"kind": "equilibrium", "rho_inf": 1.5}},
    "numerics": {"t_final": 0.1, "record_every": 4}
  })");
  ValidationResult vr = validate_config(cfg.string());
  REQUIRE(vr.ok());
  const fs::path out = dir / "out";
  CHECK(run_experiment(vr, out.string()) == 0);

  std::ifstream csv(out / "simulate.csv");
  std::string line;
  std::getline(csv, line); // hash comment
  std::getline(csv, line); // header
  while (std::getline(csv, line)) {
    std::stringstream row(line);
    std::string cell;
    std::getline(row, cell, ','); // t
    std::getline(row, cell, ','); // mass_diff
    std::getline(row, cell, ','); // rel_entropy
    CHECK(std::abs(std::stod(cell)) <= 1e-12);
  }
}

TEST_CASE("limit-study experiment writes a decreasing error column") {
  auto dir = scratch_dir();
  auto cfg = write_config(dir, R"({
    "experiment": "limit-study",
    "grid": {"nx": 16, "nv": 16, "vmax": 8.0},
    "physics": {"initial": {"rho_inf": 1.0, "amplitude": 0.1}},
    "numerics": {"eps_list": [0.4, 0.2, 0.1]}
  })");
  ValidationResult vr = validate_config(cfg.string());
  REQUIRE(vr.ok());
  const fs::path out = dir / "out";
  CHECK(run_experiment(vr, out.string()) == 0);
  const std::string csv = slurp(out / "limit-study.csv");
  CHECK(csv.find("eps,err_sup,perp_f,perp_g,sqrt_defect,order") !=
        std::string::npos);
}

TEST_CASE("linear-decay experiment produces its table and decays") {
  auto dir = scratch_dir();
  auto cfg = write_config(dir, R"({
    "experiment": "linear-decay",
    "grid": {"nx": 16, "nv": 16, "vmax": 8.0},
    "numerics": {"dt": 0.01, "t_final": 4.0, "record_every": 10}
  })");
  ValidationResult vr = validate_config(cfg.string());
  REQUIRE(vr.ok());
  const fs::path out = dir / "out";
  CHECK(run_experiment(vr, out.string()) == 0);
  const std::string csv = slurp(out / "linear-decay.csv");
  CHECK(csv.find("t,norm,h_mod,h1_mod\n") != std::string::npos);
}

TEST_CASE("profile-check reports moments and theta") {
  auto dir = scratch_dir();
  auto cfg = write_config(dir, R"({
    "experiment": "profile-check",
    "grid": {"nx": 4, "nv": 64, "vmax": 8.0}
  })");
  ValidationResult vr = validate_config(cfg.string());
  REQUIRE(vr.ok());
  const fs::path out = dir / "out";
  CHECK(run_experiment(vr, out.string()) == 0);
  const std::string rep = slurp(out / "report.txt");
  CHECK(rep.find("chi1_theta") != std::string::npos);
  CHECK(rep.find("chi2_diffusion") != std::string::npos);
}

TEST_CASE("invalid config makes run_experiment fail fast") {
  auto dir = scratch_dir();
  auto cfg = write_config(dir, R"({"experiment": "simulate",
                                   "grid": {"nx": 5}})");
  ValidationResult vr = validate_config(cfg.string());
  CHECK(!vr.ok());
  CHECK(run_experiment(vr, (dir / "out").string()) == 2);
}

TEST_SUITE_END();
