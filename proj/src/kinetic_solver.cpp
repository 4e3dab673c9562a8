#include "kinlab/kinetic_solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kinlab/diagnostics.hpp"
#include "kinlab/macro_solver.hpp"

namespace kinlab {

KineticSolver::KineticSolver(const PhaseGrid& grid, VelocityProfile chi1,
                             VelocityProfile chi2)
    : grid_(grid), chi1_(std::move(chi1)), chi2_(std::move(chi2)),
      tx_(grid.nx()) {}

DistributionPair KineticSolver::transport_substep(const DistributionPair& F,
                                                  double dt, double eps,
                                                  Eigen::VectorXd* flux_avg) {
  DistributionPair out = F;
  out.time = F.time + dt;
  if (flux_avg)
    flux_avg->setZero(grid_.nx());
  Eigen::VectorXd avg(grid_.nx());
  for (int j = 0; j < grid_.nv(); ++j) {
    const double s = grid_.v(j) * dt / eps;
    const double wv = grid_.wv(j) * grid_.v(j);
    if (flux_avg) {
      tx_.shift_with_average(out.f.col(j), s, avg);
      *flux_avg += wv * avg;
      tx_.shift_with_average(out.g.col(j), s, avg);
      *flux_avg -= wv * avg;
    } else {
      tx_.shift(out.f.col(j), s);
      tx_.shift(out.g.col(j), s);
    }
  }
  return out;
}

DistributionPair KineticSolver::reaction_substep(const DistributionPair& F,
                                                 double dt,
                                                 double eps) const {
  const double eps2 = eps * eps;
  MacroPair m = density(F, grid_);
  DistributionPair out = F;
  out.time = F.time + dt;

  for (int i = 0; i < grid_.nx(); ++i) {
    const double rf0 = m.rho_f[i], rg0 = m.rho_g[i];
    if (rf0 < -1e-12 || rg0 < -1e-12)
      throw std::runtime_error(
          "reaction_substep: negative density at x-node " +
          std::to_string(i) + " (rho_f = " + std::to_string(rf0) +
          ", rho_g = " + std::to_string(rg0) + ")");
    const double s = rf0 - rg0;

    // Riccati rho_f' = (1 + s rho_f - rho_f^2)/eps^2 between its roots
    // r+ = rho(s) and r- = -1/rho(s).
    const double rp = rho_of_m(s);
    const double rm = -1.0 / rp;
    const double lam = (rp - rm) / eps2;
    const double u0 = (rf0 - rp) / (rf0 - rm);
    const double E = std::exp(-lam * dt);
    const double den = 1.0 - u0 * E;
    const double rf1 = (rp - rm * u0 * E) / den;
    const double rg1 = rf1 - s;

    // Exact antiderivatives of the density trajectories.
    const double If = rp * dt + eps2 * std::log(den / (1.0 - u0));
    const double Ig = If - s * dt;

    const double af = std::exp(-Ig / eps2);
    const double ag = std::exp(-If / eps2);
    // bf equals the exact mild-formula source integral; the identity
    // rho_f(dt) = rho_f(0) af + bf makes the per-node mass difference exact.
    const double bf = rf1 - rf0 * af;
    const double bg = rg1 - rg0 * ag;

    out.f.row(i) = af * F.f.row(i) + bf * chi1_.values.transpose();
    out.g.row(i) = ag * F.g.row(i) + bg * chi2_.values.transpose();
  }
  return out;
}

DistributionPair KineticSolver::strang_step(const DistributionPair& F,
                                            double dt, double eps,
                                            Eigen::VectorXd* flux_avg) {
  if (flux_avg) {
    Eigen::VectorXd half1(grid_.nx()), half2(grid_.nx());
    DistributionPair a = transport_substep(F, 0.5 * dt, eps, &half1);
    DistributionPair b = reaction_substep(a, dt, eps);
    DistributionPair c = transport_substep(b, 0.5 * dt, eps, &half2);
    *flux_avg = 0.5 * (half1 + half2);
    c.time = F.time + dt;
    return c;
  }
  DistributionPair a = transport_substep(F, 0.5 * dt, eps);
  DistributionPair b = reaction_substep(a, dt, eps);
  DistributionPair c = transport_substep(b, 0.5 * dt, eps);
  c.time = F.time + dt;
  return c;
}

namespace {

double deviation_norm(const DistributionPair& F, const DistributionPair& Feq,
                      double rho_inf, const VelocityProfile& chi1,
                      const VelocityProfile& chi2, const PhaseGrid& grid) {
  double acc = 0.0;
  for (int j = 0; j < grid.nv(); ++j) {
    const double wf = grid.wv(j) / (rho_inf * chi1.values[j]);
    const double wg = grid.wv(j) * rho_inf / chi2.values[j];
    acc += wf * (F.f.col(j) - Feq.f.col(j)).squaredNorm() +
           wg * (F.g.col(j) - Feq.g.col(j)).squaredNorm();
  }
  return std::sqrt(acc * grid.dx());
}

} // namespace

TrajectoryRecord KineticSolver::run(const DistributionPair& F0,
                                    const SolverConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.t_final > 0.0))
    throw std::invalid_argument("run: dt and t_final must be positive");
  if (!(cfg.eps > 0.0) || cfg.eps > 1.0)
    throw std::invalid_argument("run: eps must lie in (0, 1]");
  if (!F0.f.allFinite() || !F0.g.allFinite())
    throw std::invalid_argument("run: initial data must be finite");

  const long n_steps =
      std::max<long>(1, std::lround(std::ceil(cfg.t_final / cfg.dt - 1e-12)));
  const double dt = cfg.t_final / static_cast<double>(n_steps);

  TrajectoryRecord rec;
  rec.dt = dt;
  rec.rho_inf = rho_infinity(mass_difference(F0, grid_));
  if (cfg.envelope && !(cfg.envelope->first < rec.rho_inf))
    throw std::invalid_argument(
        "run: envelope gamma1 must be < rho_inf so the lower bracket is "
        "positive");

  const DistributionPair Feq = equilibrium(rec.rho_inf, chi1_, chi2_, grid_);

  auto record = [&](const DistributionPair& F, double t) {
    rec.times.push_back(t);
    rec.mass_diff.push_back(mass_difference(F, grid_));
    rec.rel_entropy.push_back(
        relative_entropy(F, rec.rho_inf, chi1_, chi2_, grid_));
    if (cfg.record_dissipation)
      rec.dissipation.push_back(entropy_dissipation(F, chi1_, chi2_, grid_));
    rec.dev_norm.push_back(
        deviation_norm(F, Feq, rec.rho_inf, chi1_, chi2_, grid_));

    double lo_f = 1e300, hi_f = -1e300, lo_g = 1e300, hi_g = -1e300;
    for (int j = 0; j < grid_.nv(); ++j) {
      lo_f = std::min(lo_f, F.f.col(j).minCoeff() / chi1_.values[j]);
      hi_f = std::max(hi_f, F.f.col(j).maxCoeff() / chi1_.values[j]);
      lo_g = std::min(lo_g, F.g.col(j).minCoeff() / chi2_.values[j]);
      hi_g = std::max(hi_g, F.g.col(j).maxCoeff() / chi2_.values[j]);
    }
    rec.env_min_f.push_back(lo_f);
    rec.env_max_f.push_back(hi_f);
    rec.env_min_g.push_back(lo_g);
    rec.env_max_g.push_back(hi_g);
    rec.min_f.push_back(F.f.minCoeff());
    rec.min_g.push_back(F.g.minCoeff());
    if (cfg.keep_snapshots)
      rec.snapshots.push_back(F);

    if (cfg.envelope) {
      const double g1 = cfg.envelope->first, g2 = cfg.envelope->second;
      const double tol = 1e-8;
      const bool ok = lo_f >= rec.rho_inf - g1 - tol &&
                      hi_f <= rec.rho_inf + g2 + tol &&
                      lo_g >= 1.0 / (rec.rho_inf + g2) - tol &&
                      hi_g <= 1.0 / (rec.rho_inf - g1) + tol;
      if (!ok)
        throw std::runtime_error(
            "run: envelope violated at t = " + std::to_string(t) +
            " (f/chi1 in [" + std::to_string(lo_f) + ", " +
            std::to_string(hi_f) + "], g/chi2 in [" + std::to_string(lo_g) +
            ", " + std::to_string(hi_g) + "])");
    }
  };

  DistributionPair F = F0;
  F.eps = cfg.eps;
  record(F, 0.0);

  Eigen::VectorXd flux_avg, div(grid_.nx());
  Eigen::VectorXd u_prev;
  if (cfg.track_conservation_residual) {
    MacroPair m = density(F, grid_);
    u_prev = m.rho_f - m.rho_g;
  }

  for (long n = 1; n <= n_steps; ++n) {
    if (cfg.track_conservation_residual) {
      F = strang_step(F, dt, cfg.eps, &flux_avg);
      MacroPair m = density(F, grid_);
      Eigen::VectorXd u = m.rho_f - m.rho_g;
      tx_.derivative(flux_avg, div);
      const double resid =
          ((u - u_prev) / dt + div / cfg.eps).cwiseAbs().maxCoeff();
      rec.max_cons_residual = std::max(rec.max_cons_residual, resid);
      u_prev.swap(u);
    } else {
      F = strang_step(F, dt, cfg.eps);
    }
    if (!F.f.allFinite() || !F.g.allFinite())
      throw std::runtime_error("run: non-finite state at t = " +
                               std::to_string(n * dt));
    if (n % cfg.record_every == 0 || n == n_steps)
      record(F, n * dt);
  }
  return rec;
}

} // namespace kinlab
