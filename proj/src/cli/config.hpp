#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kinlab/profile.hpp"

namespace kinlab::cli {

struct GridBlock {
  int dim = 1;
  int nx = 32;
  int nv = 32;
  double vmax = 8.0;
};

struct InitialSpec {
  std::string kind = "cosine"; ///< equilibrium | cosine | perturbation
  double rho_inf = 1.0;
  double amplitude = 0.08;
};

struct PhysicsBlock {
  InitialSpec initial;
  double eps = 1.0;
  std::optional<double> gamma1; ///< envelope enforced when both are given
  std::optional<double> gamma2;
};

struct NumericsBlock {
  double dt = 0.0; ///< 0 means the default rule dt = cfl * eps * dx / vmax
  double cfl = 0.4;
  double t_final = 5.0;
  double delta = 0.1; ///< modified-entropy and H1 mixing weight
  int record_every = 10;
  int n_samples = 100;
  std::vector<double> eps_list = {0.4, 0.2, 0.1, 0.05};
  double t_macro = 0.2;
  double dt_coef = 0.05;
};

struct OutputBlock {
  std::string dir = "out";
  std::vector<std::string> formats = {"csv", "json"};
  std::uint64_t seed = 12345;
};

struct ProfilesBlock {
  ProfileSpec chi1;
  ProfileSpec chi2;
  ProfilesBlock() {
    chi1.kind = ProfileKind::Gaussian;
    chi1.sigma = 1.0;
    chi2.kind = ProfileKind::Gaussian;
    chi2.sigma = 1.3;
  }
};

struct RunConfig {
  std::string experiment;
  GridBlock grid;
  ProfilesBlock profiles;
  PhysicsBlock physics;
  NumericsBlock numerics;
  OutputBlock output;
};

struct ValidationResult {
  RunConfig config;
  nlohmann::json resolved; ///< the config with every default materialized
  std::vector<std::string> errors;
  std::string hash; ///< FNV-1a 64 of the canonical resolved form, hex
  bool ok() const { return errors.empty(); }
};

/// Parses and validates a config file. The experiment may be forced by the
/// CLI subcommand; a --seed override replaces output.seed (and enters the
/// hash, since it changes results). Unknown keys are reported by name.
/// With require_experiment false (the standalone validate command) a config
/// may omit the experiment and rely on a subcommand to supply it later.
ValidationResult
validate_config(const std::string& path,
                const std::optional<std::string>& experiment_override = {},
                const std::optional<std::uint64_t>& seed_override = {},
                bool require_experiment = true);

/// Runs the configured experiment, writing the resolved config echo, the
/// experiment data files, and a summary into out_dir (defaults to the
/// config's output.dir). Returns 0 only if every enabled check passes.
int run_experiment(const ValidationResult& vr,
                   const std::optional<std::string>& out_dir = {});

} // namespace kinlab::cli
