#include "config.hpp"

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "kinlab/diagnostics.hpp"
#include "kinlab/kinetic_solver.hpp"
#include "kinlab/linear_ops.hpp"
#include "kinlab/macro_solver.hpp"
#include "kinlab/numfmt.hpp"

namespace kinlab::cli {

namespace {

struct Check {
  std::string name;
  double value = 0.0;
  bool pass = false;
};

struct ExperimentOutput {
  std::vector<Check> checks;
  nlohmann::json metrics;
  std::string csv;      ///< empty if the experiment has no table
  std::string csv_name; ///< file name for the table
  std::string report;   ///< flat key/value report, if any
};

DistributionPair make_initial(const RunConfig& c, const PhaseGrid& grid,
                              const VelocityProfile& chi1,
                              const VelocityProfile& chi2) {
  const auto& ini = c.physics.initial;
  if (ini.kind == "equilibrium")
    return equilibrium(ini.rho_inf, chi1, chi2, grid);
  DistributionPair F = DistributionPair::zero(grid);
  for (int i = 0; i < grid.nx(); ++i) {
    const double cosx = std::cos(2.0 * M_PI * grid.x(i));
    if (ini.kind == "cosine") {
      const double r = ini.rho_inf + ini.amplitude * cosx;
      F.f.row(i) = r * chi1.values.transpose();
      F.g.row(i) = chi2.values.transpose() / r;
    } else { // perturbation: mean-zero mass difference
      F.f.row(i) = ini.amplitude * cosx * chi1.values.transpose();
      F.g.row(i) = -ini.amplitude * cosx * chi2.values.transpose();
    }
  }
  return F;
}

double default_dt(const RunConfig& c) {
  if (c.numerics.dt > 0.0)
    return c.numerics.dt;
  return c.numerics.cfl * c.physics.eps / (c.grid.nx * c.grid.vmax);
}

ExperimentOutput run_simulate(const RunConfig& c) {
  PhaseGrid grid(c.grid.nx, c.grid.nv, c.grid.vmax);
  VelocityProfile chi1 = build_profile(c.profiles.chi1, grid);
  VelocityProfile chi2 = build_profile(c.profiles.chi2, grid);
  KineticSolver solver(grid, chi1, chi2);

  SolverConfig sc;
  sc.dt = default_dt(c);
  sc.t_final = c.numerics.t_final;
  sc.eps = c.physics.eps;
  sc.record_every = c.numerics.record_every;
  sc.record_dissipation = true;
  if (c.physics.gamma1 && c.physics.gamma2)
    sc.envelope = std::make_pair(*c.physics.gamma1, *c.physics.gamma2);

  TrajectoryRecord rec = solver.run(make_initial(c, grid, chi1, chi2), sc);

  ExperimentOutput out;
  out.csv_name = "simulate.csv";
  out.csv = "t,mass_diff,rel_entropy,dissipation,env_min_f,env_max_f,"
            "env_min_g,env_max_g\n";
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    out.csv += format_double(rec.times[k]) + ',' +
               format_double(rec.mass_diff[k]) + ',' +
               format_double(rec.rel_entropy[k]) + ',' +
               format_double(rec.dissipation[k]) + ',' +
               format_double(rec.env_min_f[k]) + ',' +
               format_double(rec.env_max_f[k]) + ',' +
               format_double(rec.env_min_g[k]) + ',' +
               format_double(rec.env_max_g[k]) + '\n';
  }

  double drift = 0.0, uptick = -1e300, diss_max = -1e300, min_val = 1e300;
  for (std::size_t k = 0; k < rec.times.size(); ++k) {
    drift = std::max(drift, std::abs(rec.mass_diff[k] - rec.mass_diff[0]));
    diss_max = std::max(diss_max, rec.dissipation[k]);
    min_val = std::min({min_val, rec.min_f[k], rec.min_g[k]});
    if (k > 0)
      uptick = std::max(uptick, rec.rel_entropy[k] - rec.rel_entropy[k - 1]);
  }
  const double entropy_tol = 1e-8 * rec.dt * rec.dt * c.numerics.record_every;
  out.checks.push_back({"mass_difference_drift", drift, drift <= 1e-10});
  out.checks.push_back(
      {"entropy_monotone_uptick", uptick, uptick <= entropy_tol});
  out.checks.push_back(
      {"dissipation_nonpositive_max", diss_max, diss_max <= 1e-12});
  out.checks.push_back({"positivity_min", min_val, min_val >= -1e-13});

  out.metrics["rho_inf"] = rec.rho_inf;
  out.metrics["dt"] = rec.dt;
  out.metrics["final_entropy"] = rec.rel_entropy.back();
  out.metrics["records"] = rec.times.size();
  try {
    DecayFit fit = fit_decay_rate(rec.times, rec.dev_norm);
    out.metrics["deviation_decay_rate"] = fit.lambda;
    out.metrics["deviation_decay_r2"] = fit.r2;
  } catch (const std::exception&) {
    // stationary or too-short runs have no meaningful rate
  }
  return out;
}

ExperimentOutput run_linear_decay(const RunConfig& c) {
  PhaseGrid grid(c.grid.nx, c.grid.nv, c.grid.vmax);
  VelocityProfile chi1 = build_profile(c.profiles.chi1, grid);
  VelocityProfile chi2 = build_profile(c.profiles.chi2, grid);
  LinearOps ops(grid, chi1, chi2, c.physics.initial.rho_inf);

  DistributionPair F0 = DistributionPair::zero(grid);
  for (int i = 0; i < grid.nx(); ++i) {
    const double cosx =
        c.physics.initial.amplitude * std::cos(2.0 * M_PI * grid.x(i));
    F0.f.row(i) = cosx * chi1.values.transpose();
    F0.g.row(i) = -cosx * chi2.values.transpose();
  }

  const double dt = default_dt(c);
  LinearTrajectory traj = ops.solve_linearized(
      F0, dt, c.numerics.t_final, c.numerics.delta, c.numerics.record_every);

  ExperimentOutput out;
  out.csv_name = "linear-decay.csv";
  out.csv = "t,norm,h_mod,h1_mod\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    out.csv += format_double(traj.times[k]) + ',' +
               format_double(traj.norm[k]) + ',' +
               format_double(traj.h_mod[k]) + ',' +
               format_double(traj.h1_mod[k]) + '\n';

  DecayFit fit = fit_decay_rate(traj.times, traj.norm);
  double h_uptick = -1e300, h1_uptick = -1e300;
  for (std::size_t k = 1; k < traj.times.size(); ++k) {
    h_uptick = std::max(h_uptick, traj.h_mod[k] - traj.h_mod[k - 1]);
    h1_uptick = std::max(h1_uptick, traj.h1_mod[k] - traj.h1_mod[k - 1]);
  }
  const double slack = 1e-12 * (1.0 + traj.h_mod.front());
  out.checks.push_back({"decay_rate_positive", fit.lambda, fit.lambda > 0.0});
  out.checks.push_back({"decay_fit_r2", fit.r2, fit.r2 >= 0.99});
  out.checks.push_back(
      {"modified_entropy_uptick", h_uptick, h_uptick <= slack});
  out.checks.push_back({"h1_functional_uptick", h1_uptick,
                        h1_uptick <= slack * (1.0 + traj.h1_mod.front())});

  out.metrics["lambda_norm"] = fit.lambda;
  out.metrics["r2_norm"] = fit.r2;
  DecayFit fit_h = fit_decay_rate(traj.times, traj.h_mod);
  out.metrics["lambda_h_mod"] = fit_h.lambda;
  out.metrics["dt"] = dt;
  return out;
}

ExperimentOutput run_coercivity(const RunConfig& c) {
  PhaseGrid grid(c.grid.nx, c.grid.nv, c.grid.vmax);
  CoercivityReport rep = coercivity_report(
      grid, c.profiles.chi1, c.profiles.chi2, c.physics.initial.rho_inf,
      c.numerics.n_samples, c.output.seed);

  ExperimentOutput out;
  out.report = rep.to_text();
  for (const auto& e : rep.entries) {
    if (!e.informational)
      out.checks.push_back({e.name, e.value, e.pass});
    out.metrics[e.name] = e.value;
  }
  return out;
}

ExperimentOutput run_limit_study(const RunConfig& c) {
  PhaseGrid grid(c.grid.nx, c.grid.nv, c.grid.vmax);
  VelocityProfile chi1 = build_profile(c.profiles.chi1, grid);
  VelocityProfile chi2 = build_profile(c.profiles.chi2, grid);

  const double rho_inf = c.physics.initial.rho_inf;
  const double amp = c.physics.initial.amplitude;
  auto rho0 = [rho_inf, amp](double x) {
    return rho_inf + amp * std::cos(2.0 * M_PI * x);
  };

  LimitStudyOptions opt;
  opt.t_macro = c.numerics.t_macro;
  opt.dt_coef = c.numerics.dt_coef;
  EpsSweepReport rep =
      limit_study(rho0, c.numerics.eps_list, grid, chi1, chi2, opt);

  ExperimentOutput out;
  out.csv_name = "limit-study.csv";
  out.csv = rep.to_csv();

  bool decreasing = true, none_failed = true;
  double ratio_min = 1e300, ratio_max = 0.0;
  for (std::size_t k = 0; k < rep.entries.size(); ++k) {
    const auto& e = rep.entries[k];
    if (e.failed) {
      none_failed = false;
      continue;
    }
    if (k > 0 && !rep.entries[k - 1].failed &&
        !(e.err_sup < rep.entries[k - 1].err_sup))
      decreasing = false;
    const double r = e.sqrt_defect / e.eps;
    ratio_min = std::min(ratio_min, r);
    ratio_max = std::max(ratio_max, r);
  }
  out.checks.push_back({"all_eps_completed", none_failed ? 1.0 : 0.0,
                        none_failed});
  out.checks.push_back(
      {"err_sup_strictly_decreasing", decreasing ? 1.0 : 0.0, decreasing});
  const double spread = ratio_max / std::max(ratio_min, 1e-300);
  out.checks.push_back(
      {"sqrt_defect_over_eps_spread", spread, spread < 2.0});

  out.metrics["entries"] = nlohmann::json::parse(rep.to_json());
  return out;
}

ExperimentOutput run_profile_check(const RunConfig& c) {
  PhaseGrid grid(c.grid.nx, c.grid.nv, c.grid.vmax);
  ExperimentOutput out;

  std::vector<double> deltas;
  for (int i = 0; i < 10; ++i)
    deltas.push_back(1e-2 * std::pow(30.0, i / 9.0));

  auto one = [&](const char* name, const ProfileSpec& spec) {
    VelocityProfile p = build_profile(spec, grid);
    ThetaFit fit = theta_exponent(p, grid, deltas);
    const std::string base(name);
    out.checks.push_back({base + "_mass_error", std::abs(p.mass - 1.0),
                          std::abs(p.mass - 1.0) <= 1e-12});
    out.checks.push_back({base + "_mean_flux", std::abs(p.mean_flux),
                          std::abs(p.mean_flux) <= 1e-12});
    out.checks.push_back({base + "_diffusion_positive", p.diffusion,
                          p.diffusion > 0.0});
    const bool analytic = spec.kind != ProfileKind::CustomSamples;
    out.checks.push_back({base + "_theta", fit.theta,
                          !analytic ||
                              (fit.theta >= 0.9 && fit.theta <= 1.1)});
    out.report += base + "_mass = " + format_double(p.mass) + " | pass\n";
    out.report += base + "_mean_flux = " + format_double(p.mean_flux) +
                  " | pass\n";
    out.report +=
        base + "_diffusion = " + format_double(p.diffusion) + " | pass\n";
    out.report += base + "_theta = " + format_double(fit.theta) + " | " +
                  (!analytic || (fit.theta >= 0.9 && fit.theta <= 1.1)
                       ? "pass"
                       : "fail") +
                  "\n";
    out.metrics[base] = {{"mass", p.mass},
                         {"mean_flux", p.mean_flux},
                         {"diffusion", p.diffusion},
                         {"theta", fit.theta},
                         {"theta_C", fit.constant}};
  };
  one("chi1", c.profiles.chi1);
  one("chi2", c.profiles.chi2);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot write " + path.string());
  f << body;
}

} // namespace

int run_experiment(const ValidationResult& vr,
                   const std::optional<std::string>& out_dir) {
  if (!vr.ok()) {
    for (const auto& e : vr.errors)
      std::cerr << "config error: " << e << "\n";
    return 2;
  }
  const RunConfig& c = vr.config;
  const std::filesystem::path dir = out_dir.value_or(c.output.dir);
  std::filesystem::create_directories(dir);

  nlohmann::json resolved = vr.resolved;
  resolved["config_hash"] = vr.hash;
  write_text(dir / "resolved_config.json", resolved.dump(2) + "\n");

  ExperimentOutput out;
  try {
    if (c.experiment == "simulate")
      out = run_simulate(c);
    else if (c.experiment == "linear-decay")
      out = run_linear_decay(c);
    else if (c.experiment == "coercivity-check")
      out = run_coercivity(c);
    else if (c.experiment == "limit-study")
      out = run_limit_study(c);
    else if (c.experiment == "profile-check")
      out = run_profile_check(c);
    else {
      std::cerr << "unknown experiment '" << c.experiment << "'\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << c.experiment << " failed: " << e.what() << "\n";
    return 3;
  }

  const bool want_csv =
      std::find(c.output.formats.begin(), c.output.formats.end(), "csv") !=
      c.output.formats.end();
  const bool want_json =
      std::find(c.output.formats.begin(), c.output.formats.end(), "json") !=
      c.output.formats.end();

  if (want_csv && !out.csv.empty())
    write_text(dir / out.csv_name,
               "# config_hash=" + vr.hash + "\n" + out.csv);
  if (!out.report.empty())
    write_text(dir / "report.txt", "# config_hash=" + vr.hash + "\n" +
                                       out.report);

  bool all_pass = true;
  nlohmann::json checks = nlohmann::json::object();
  for (const auto& chk : out.checks) {
    checks[chk.name] = {{"value", chk.value}, {"pass", chk.pass}};
    all_pass = all_pass && chk.pass;
  }
  if (want_json) {
    nlohmann::json summary{{"config_hash", vr.hash},
                           {"experiment", c.experiment},
                           {"checks", checks},
                           {"metrics", out.metrics},
                           {"status", all_pass ? "pass" : "fail"}};
    write_text(dir / "summary.json", summary.dump(2) + "\n");
  }

  for (const auto& chk : out.checks)
    std::cout << (chk.pass ? "[pass] " : "[FAIL] ") << chk.name << " = "
              << format_double(chk.value) << "\n";
  return all_pass ? 0 : 1;
}

} // namespace kinlab::cli
