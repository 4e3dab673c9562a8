// Acceptance suite: runs each release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code = number of failures.
// argv[1] (optional) is the path of the CLI binary, used by the
// reproducibility criterion; without it that criterion is a failure.

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kinlab/diagnostics.hpp"
#include "kinlab/kinetic_solver.hpp"
#include "kinlab/linear_ops.hpp"
#include "kinlab/macro_solver.hpp"
#include "kinlab/rng.hpp"

using namespace kinlab;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %-28s %s\n", pass ? "PASS" : "FAIL", idx,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass)
    ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

DistributionPair cosine_equilibrium(const PhaseGrid& g,
                                    const VelocityProfile& chi1,
                                    const VelocityProfile& chi2,
                                    double rho_bar, double amp) {
  DistributionPair F = DistributionPair::zero(g);
  for (int i = 0; i < g.nx(); ++i) {
    const double r = rho_bar + amp * std::cos(2.0 * M_PI * g.x(i));
    F.f.row(i) = r * chi1.values.transpose();
    F.g.row(i) = chi2.values.transpose() / r;
  }
  return F;
}

DistributionPair cosine_perturbation(const PhaseGrid& g,
                                     const VelocityProfile& chi1,
                                     const VelocityProfile& chi2,
                                     double amp) {
  DistributionPair F = DistributionPair::zero(g);
  for (int i = 0; i < g.nx(); ++i) {
    const double c = amp * std::cos(2.0 * M_PI * g.x(i));
    F.f.row(i) = c * chi1.values.transpose();
    F.g.row(i) = -c * chi2.values.transpose();
  }
  return F;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

} // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  PhaseGrid grid32(32, 32, 8.0);
  ProfileSpec spec1, spec2;
  spec2.sigma = 1.3;
  VelocityProfile chi1 = build_profile(spec1, grid32);
  VelocityProfile chi2 = build_profile(spec2, grid32);

  // Criteria 1-3 share one nonlinear production run: nx = nv = 32, eps = 1,
  // t_final = 5, local-equilibrium data inside the (0.1, 0.1) envelope.
  try {
    KineticSolver solver(grid32, chi1, chi2);
    SolverConfig cfg;
    cfg.dt = 0.4 / (grid32.nx() * grid32.vmax());
    cfg.t_final = 5.0;
    cfg.eps = 1.0;
    cfg.record_every = 10;
    cfg.record_dissipation = true;
    cfg.envelope = std::make_pair(0.1, 0.1);
    TrajectoryRecord rec =
        solver.run(cosine_equilibrium(grid32, chi1, chi2, 1.0, 0.08), cfg);

    double drift = 0.0;
    for (double md : rec.mass_diff)
      drift = std::max(drift, std::abs(md - rec.mass_diff.front()));
    report(1, "mass-difference conservation", drift <= 1e-10,
           "drift=" + fmt(drift) + " tol=1e-10");

    double env_breach = 0.0;
    const double g1 = 0.1, g2 = 0.1;
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      env_breach = std::max(env_breach, rec.rho_inf - g1 - rec.env_min_f[k]);
      env_breach = std::max(env_breach, rec.env_max_f[k] - rec.rho_inf - g2);
      env_breach =
          std::max(env_breach, 1.0 / (rec.rho_inf + g2) - rec.env_min_g[k]);
      env_breach =
          std::max(env_breach, rec.env_max_g[k] - 1.0 / (rec.rho_inf - g1));
    }
    report(2, "maximum-principle envelope", env_breach <= 1e-8,
           "breach=" + fmt(env_breach) + " tol=1e-8");

    double uptick = -1e300, diss_max = -1e300;
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
      if (k > 0)
        uptick = std::max(uptick, rec.rel_entropy[k] - rec.rel_entropy[k - 1]);
      diss_max = std::max(diss_max, rec.dissipation[k]);
    }
    const double etol = 1e-8 * rec.dt * rec.dt * cfg.record_every;
    report(3, "entropy decay",
           uptick <= etol && diss_max <= 1e-12,
           "uptick=" + fmt(uptick) + " tol=" + fmt(etol) +
               " diss_max=" + fmt(diss_max) + " tol=1e-12");
  } catch (const std::exception& e) {
    report(1, "mass-difference conservation", false, e.what());
    report(2, "maximum-principle envelope", false, "run failed");
    report(3, "entropy decay", false, "run failed");
  }

  // 4. Microscopic coercivity with the explicit constant at three rho_inf.
  try {
    PhaseGrid g(16, 16, 8.0);
    VelocityProfile c1 = build_profile(spec1, g);
    VelocityProfile c2 = build_profile(spec2, g);
    double worst_margin = 1e300;
    for (double rho : {0.5, 1.0, 2.0}) {
      LinearOps ops(g, c1, c2, rho);
      Rng rng(424242);
      const double cmin = std::min(rho, 1.0 / rho);
      for (int t = 0; t < 100; ++t) {
        DistributionPair F = band_limited_sample(rng, g, c1, c2);
        DistributionPair PiF = ops.apply_Pi(F);
        DistributionPair micro;
        micro.f = F.f - PiF.f;
        micro.g = F.g - PiF.g;
        const double m2 = ops.inner(micro, micro);
        if (m2 <= 1e-12 * ops.inner(F, F))
          continue;
        worst_margin = std::min(
            worst_margin,
            -ops.inner(ops.apply_L(F), F) / m2 - (cmin - 1e-6));
      }
    }
    report(4, "microscopic coercivity", worst_margin >= 0.0,
           "worst margin=" + fmt(worst_margin) + " (>=0)");
  } catch (const std::exception& e) {
    report(4, "microscopic coercivity", false, e.what());
  }

  // 5. Structure identities on dense 16x16 assemblies.
  try {
    PhaseGrid g(16, 16, 8.0);
    LinearOps ops(g, build_profile(spec1, g), build_profile(spec2, g), 1.0);
    Eigen::VectorXd w = weight_diagonal(g, ops.chi1(), ops.chi2(), 1.0);
    Eigen::MatrixXd L = assemble_dense(ops, OperatorLabel::L).mat;
    Eigen::MatrixXd T = assemble_dense(ops, OperatorLabel::T).mat;
    Eigen::MatrixXd Pi = assemble_dense(ops, OperatorLabel::Pi).mat;
    Eigen::MatrixXd K = assemble_dense(ops, OperatorLabel::K).mat;
    Eigen::MatrixXd Lam = assemble_dense(ops, OperatorLabel::Lambda).mat;

    Eigen::MatrixXd WL = w.asDiagonal() * L;
    Eigen::MatrixXd WT = w.asDiagonal() * T;
    const double e_pi = (Pi * Pi - Pi).norm() / Pi.norm();
    const double e_ptp = (Pi * T * Pi).norm() / T.norm();
    const double e_split = (L - (K - Lam)).norm() / L.norm();
    const double e_sym = (WL - WL.transpose()).norm() / WL.norm();
    const double e_skew = (WT + WT.transpose()).norm() / WT.norm();
    const double worst =
        std::max({e_pi, e_ptp, e_split, e_sym, e_skew});
    report(5, "structure identities", worst <= 1e-10,
           "worst residual=" + fmt(worst) + " tol=1e-10");
  } catch (const std::exception& e) {
    report(5, "structure identities", false, e.what());
  }

  // 6. modified-entropy machinery: A bound, macroscopic coercivity, H monotonicity.
  try {
    PhaseGrid g(16, 16, 8.0);
    CoercivityReport rep = coercivity_report(g, spec1, spec2, 1.0, 100,
                                             987654321ULL);
    double a_bound = 0.0, lam_M = 0.0, target = 0.0, uptick = 1.0;
    for (const auto& e : rep.entries) {
      if (e.name == "A_bound")
        a_bound = e.value;
      if (e.name == "P2_lambda_M")
        lam_M = e.value;
      if (e.name == "P2_target_4pi2_D0")
        target = e.value;
      if (e.name == "H_monotone_uptick_delta_default")
        uptick = e.value;
    }
    const bool pass = a_bound <= 0.5 + 1e-9 &&
                      std::abs(lam_M / target - 1.0) <= 0.05 &&
                      uptick <= 1e-12;
    report(6, "modified-entropy machinery", pass,
           "|AF|/|(1-Pi)F|max=" + fmt(a_bound) +
               " lamM/4pi2D0=" + fmt(lam_M / target) +
               " H_uptick=" + fmt(uptick));
  } catch (const std::exception& e) {
    report(6, "modified-entropy machinery", false, e.what());
  }

  // 7. Linear exponential decay vs the dense generator's spectral gap.
  try {
    PhaseGrid g(16, 16, 8.0);
    VelocityProfile c1 = build_profile(spec1, g);
    VelocityProfile c2 = build_profile(spec2, g);
    LinearOps ops(g, c1, c2, 1.0);

    Eigen::MatrixXd G = assemble_dense(ops, OperatorLabel::L).mat -
                        assemble_dense(ops, OperatorLabel::T).mat;
    Eigen::EigenSolver<Eigen::MatrixXd> es(G);
    double gap = 1e300;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
      const double re = es.eigenvalues()[k].real();
      if (-re > 1e-8)
        gap = std::min(gap, -re);
    }

    LinearTrajectory traj = ops.solve_linearized(
        cosine_perturbation(g, c1, c2, 1.0), 0.005, 10.0, 0.1, 20);
    DecayFit fit = fit_decay_rate(traj.times, traj.norm);
    const bool pass = fit.lambda > 0.0 && fit.r2 >= 0.99 &&
                      std::abs(fit.lambda - gap) <= 0.2 * gap;
    report(7, "linear exponential decay", pass,
           "lambda=" + fmt(fit.lambda) + " gap=" + fmt(gap) +
               " R2=" + fmt(fit.r2));
  } catch (const std::exception& e) {
    report(7, "linear exponential decay", false, e.what());
  }

  // 8. Nonlinear exponential decay inside the small envelope.
  try {
    PhaseGrid g(16, 16, 8.0);
    VelocityProfile c1 = build_profile(spec1, g);
    VelocityProfile c2 = build_profile(spec2, g);
    KineticSolver solver(g, c1, c2);
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_final = 10.0;
    cfg.record_every = 40;
    cfg.envelope = std::make_pair(0.05, 0.05);
    TrajectoryRecord rec =
        solver.run(cosine_equilibrium(g, c1, c2, 1.0, 0.04), cfg);
    DecayFit fit = fit_decay_rate(rec.times, rec.dev_norm);
    report(8, "nonlinear exponential decay",
           fit.lambda > 0.0 && fit.r2 >= 0.99,
           "lambda=" + fmt(fit.lambda) + " R2=" + fmt(fit.r2));
  } catch (const std::exception& e) {
    report(8, "nonlinear exponential decay", false, e.what());
  }

  // 9. Macroscopic limit: the default eps sweep.
  try {
    auto rho0 = [](double x) { return 1.0 + 0.1 * std::cos(2.0 * M_PI * x); };
    EpsSweepReport rep = limit_study(rho0, {0.4, 0.2, 0.1, 0.05}, grid32,
                                     chi1, chi2, {});
    bool ok = true;
    double ratio_min = 1e300, ratio_max = 0.0;
    for (std::size_t k = 0; k < rep.entries.size(); ++k) {
      const auto& e = rep.entries[k];
      if (e.failed) {
        ok = false;
        continue;
      }
      if (k > 0 && !(e.err_sup < rep.entries[k - 1].err_sup))
        ok = false;
      ratio_min = std::min(ratio_min, e.sqrt_defect / e.eps);
      ratio_max = std::max(ratio_max, e.sqrt_defect / e.eps);
    }
    const double total = rep.entries.front().err_sup /
                         std::max(rep.entries.back().err_sup, 1e-300);
    const double spread = ratio_max / std::max(ratio_min, 1e-300);
    ok = ok && total >= 4.0 && spread < 2.0;
    report(9, "macroscopic limit sweep", ok,
           "err(0.4)/err(0.05)=" + fmt(total) + " (>=4), defect spread=" +
               fmt(spread) + " (<2)");
  } catch (const std::exception& e) {
    report(9, "macroscopic limit sweep", false, e.what());
  }

  // 10. Diffusion solver: single-mode rate and mean conservation.
  try {
    const double d1 = chi1.diffusion, d2 = chi2.diffusion;
    const int nx = 64;
    MacroState s;
    s.m.resize(nx);
    for (int i = 0; i < nx; ++i)
      s.m[i] = 1e-3 * std::cos(2.0 * M_PI * i / nx);
    const double mean0 = s.m.mean();

    auto amp1 = [&](const Eigen::VectorXd& m) {
      double re = 0.0;
      for (int i = 0; i < nx; ++i)
        re += m[i] * std::cos(2.0 * M_PI * i / nx);
      return 2.0 * re / nx;
    };
    const double dt = 2e-4;
    double a_prev = amp1(s.m), rate = 0.0;
    const int steps = 10;
    double mean_drift = 0.0;
    for (int k = 0; k < steps; ++k) {
      s = diffusion_step(s, dt, d1, d2);
      const double a = amp1(s.m);
      rate += -std::log(a / a_prev) / dt;
      a_prev = a;
      mean_drift = std::max(mean_drift, std::abs(s.m.mean() - mean0));
    }
    rate /= steps;
    const double expect = 4.0 * M_PI * M_PI * 0.5 * (d1 + d2);
    const bool pass =
        std::abs(rate - expect) <= 0.05 * expect && mean_drift <= 1e-12;
    report(10, "diffusion solver", pass,
           "rate=" + fmt(rate) + " expect=" + fmt(expect) +
               " mean drift=" + fmt(mean_drift));
  } catch (const std::exception& e) {
    report(10, "diffusion solver", false, e.what());
  }

  // 11. Thin-slab tail exponent of the default gaussian profile.
  try {
    PhaseGrid g(4, 64, 8.0);
    VelocityProfile p = build_profile(spec1, g);
    std::vector<double> deltas;
    for (int i = 0; i < 10; ++i)
      deltas.push_back(1e-2 * std::pow(30.0, i / 9.0));
    ThetaFit fit = theta_exponent(p, g, deltas);
    report(11, "theta tail condition",
           fit.theta >= 0.9 && fit.theta <= 1.1,
           "theta=" + fmt(fit.theta) + " in [0.9, 1.1]");
  } catch (const std::exception& e) {
    report(11, "theta tail condition", false, e.what());
  }

  // 12. CLI determinism: identical config+seed => byte-identical outputs.
  try {
    if (cli.empty())
      throw std::runtime_error("no CLI binary path given (argv[1])");
    fs::path dir = fs::temp_directory_path() / "kinlab_acceptance_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
      std::ofstream cfg(dir / "config.json");
      cfg << R"({"experiment": "simulate",
                 "grid": {"nx": 16, "nv": 16, "vmax": 8.0},
                 "physics": {"initial": {"kind": "cosine", "rho_inf": 1.0,
                                         "amplitude": 0.05}},
                 "numerics": {"t_final": 0.5, "record_every": 10},
                 "output": {"seed": 31415}})";
    }
    auto run_once = [&](const std::string& sub) {
      const std::string cmd = "'" + cli + "' simulate --config '" +
                              (dir / "config.json").string() + "' --out '" +
                              (dir / sub).string() + "' > /dev/null";
      return std::system(cmd.c_str());
    };
    const int rc1 = run_once("a");
    const int rc2 = run_once("b");
    bool same = rc1 == 0 && rc2 == 0;
    for (const char* name :
         {"simulate.csv", "summary.json", "resolved_config.json"}) {
      const std::string s1 = slurp(dir / "a" / name);
      same = same && !s1.empty() && s1 == slurp(dir / "b" / name);
    }
    report(12, "CLI determinism", same,
           same ? "outputs byte-identical" : "outputs differ or run failed");
  } catch (const std::exception& e) {
    report(12, "CLI determinism", false, e.what());
  }

  std::printf("%d of 12 criteria passed\n", 12 - g_failures);
  return g_failures;
}
