#include "kinlab/diagnostics.hpp"

#include <cmath>
#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "kinlab/macro_solver.hpp"
#include "kinlab/numfmt.hpp"

namespace kinlab {

double relative_entropy(const DistributionPair& F, double rho_inf,
                        const VelocityProfile& chi1,
                        const VelocityProfile& chi2, const PhaseGrid& grid) {
  double acc = 0.0;
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < grid.nv(); ++j) {
      const double f = F.f(i, j), g = F.g(i, j);
      if (!(f > 0.0) || !(g > 0.0))
        throw std::runtime_error(
            "relative_entropy: non-positive value at (x-node " +
            std::to_string(i) + ", v-node " + std::to_string(j) +
            "); entropy undefined");
      const double bf = rho_inf * chi1.values[j];
      const double bg = chi2.values[j] / rho_inf;
      const double w = grid.wv(j);
      acc += w * (f * (std::log(f) - std::log(bf)) - f + bf);
      acc += w * (g * (std::log(g) - std::log(bg)) - g + bg);
    }
  }
  return acc * grid.dx();
}

double entropy_dissipation(const DistributionPair& F,
                           const VelocityProfile& chi1,
                           const VelocityProfile& chi2,
                           const PhaseGrid& grid) {
  const int nv = grid.nv();
  Eigen::VectorXd lchi1(nv), lchi2(nv), lf(nv), lg(nv);
  for (int j = 0; j < nv; ++j) {
    lchi1[j] = std::log(chi1.values[j]);
    lchi2[j] = std::log(chi2.values[j]);
  }
  const double w2 = grid.dv() * grid.dv();
  double total = 0.0;
  for (int i = 0; i < grid.nx(); ++i) {
    for (int j = 0; j < nv; ++j) {
      const double f = F.f(i, j), g = F.g(i, j);
      if (!(f > 0.0) || !(g > 0.0))
        throw std::runtime_error(
            "entropy_dissipation: non-positive value at (x-node " +
            std::to_string(i) + ", v-node " + std::to_string(j) + ")");
      lf[j] = std::log(f);
      lg[j] = std::log(g);
    }
    double acc = 0.0;
    for (int j = 0; j < nv; ++j) {
      const double fj = F.f(i, j);
      const double num_j = lf[j] - lchi1[j];
      for (int jp = 0; jp < nv; ++jp) {
        // each term is (a-b)(ln a - ln b) >= 0 with a = f g', b = chi1 chi2'
        const double a = fj * F.g(i, jp);
        const double b = chi1.values[j] * chi2.values[jp];
        acc += (a - b) * (num_j + lg[jp] - lchi2[jp]);
      }
    }
    total += acc;
  }
  return -total * w2 * grid.dx();
}

DecayFit fit_decay_rate(const std::vector<double>& times,
                        const std::vector<double>& values, double window) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_decay_rate: size mismatch");
  if (!(window > 0.0) || window > 1.0)
    throw std::invalid_argument("fit_decay_rate: window must be in (0, 1]");
  const std::size_t n = times.size();
  if (n < 2)
    throw std::invalid_argument("fit_decay_rate: need at least 2 samples");
  const double t_cut = times.back() - window * (times.back() - times.front());

  std::vector<double> t, y;
  for (std::size_t i = 0; i < n; ++i) {
    if (times[i] + 1e-15 < t_cut)
      continue;
    if (!(values[i] > 0.0))
      throw std::invalid_argument(
          "fit_decay_rate: non-positive value inside the fit window at t = " +
          std::to_string(times[i]));
    t.push_back(times[i]);
    y.push_back(std::log(values[i]));
  }
  if (t.size() < 10)
    throw std::invalid_argument(
        "fit_decay_rate: fewer than 10 samples in the fit window");

  const double m = static_cast<double>(t.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sx += t[i];
    sy += y[i];
    sxx += t[i] * t[i];
    sxy += t[i] * y[i];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / m;

  double ss_res = 0, ss_tot = 0;
  const double ymean = sy / m;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double pred = intercept + slope * t[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ymean) * (y[i] - ymean);
  }
  DecayFit fit;
  fit.lambda = -slope;
  fit.r2 = ss_tot < 1e-30 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

namespace {

double trapezoid(const std::vector<double>& t, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k)
    acc += 0.5 * (v[k] + v[k + 1]) * (t[k + 1] - t[k]);
  return acc;
}

} // namespace

EpsSweepReport limit_study(const std::function<double(double)>& rho0,
                           const std::vector<double>& eps_list,
                           const PhaseGrid& grid, const VelocityProfile& chi1,
                           const VelocityProfile& chi2,
                           const LimitStudyOptions& opt) {
  for (std::size_t k = 0; k + 1 < eps_list.size(); ++k)
    if (!(eps_list[k] > eps_list[k + 1]))
      throw std::invalid_argument("limit_study: eps list must decrease");

  KineticSolver solver(grid, chi1, chi2);
  const double T = opt.t_macro;
  const int nrec = opt.n_records;

  // Reference solution of the limit equation on a refined x-grid whose
  // every macro_refine-th node coincides with a kinetic node.
  const int nxm = opt.macro_refine * grid.nx();
  MacroState m0;
  m0.m.resize(nxm);
  for (int i = 0; i < nxm; ++i)
    m0.m[i] = m_of_rho(rho0(static_cast<double>(i) / nxm));
  const long n_macro = nrec * std::lround(std::ceil(T / (nrec * opt.macro_dt)));
  MacroTrajectory macro = run_diffusion(m0, T / n_macro, T, chi1.diffusion,
                                        chi2.diffusion,
                                        static_cast<int>(n_macro / nrec));

  EpsSweepReport report;
  for (double eps : eps_list) {
    EpsSweepEntry entry;
    entry.eps = eps;
    try {
      DistributionPair F0 = DistributionPair::zero(grid);
      for (int i = 0; i < grid.nx(); ++i) {
        const double r = rho0(grid.x(i));
        F0.f.row(i) = r * chi1.values.transpose();
        F0.g.row(i) = chi2.values.transpose() / r;
      }

      SolverConfig cfg;
      cfg.eps = eps;
      const double rec_dt = T / nrec;
      const long per_rec =
          std::max<long>(1, std::lround(std::ceil(rec_dt / (opt.dt_coef * eps * eps))));
      cfg.dt = rec_dt / per_rec;
      cfg.t_final = T;
      cfg.record_every = static_cast<int>(per_rec);
      cfg.keep_snapshots = true;
      cfg.track_conservation_residual = true;
      TrajectoryRecord rec = solver.run(F0, cfg);

      std::vector<double> errs, pf, pg, sq;
      for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
        auto [mac, perp] = micro_macro_split(rec.snapshots[k], eps, chi1,
                                             chi2, grid);
        Eigen::VectorXd u = mac.rho_f - mac.rho_g;
        double err2 = 0.0, sq2 = 0.0;
        for (int i = 0; i < grid.nx(); ++i) {
          const double m_ref =
              macro.states[k][opt.macro_refine * i];
          err2 += (u[i] - m_ref) * (u[i] - m_ref);
          const double d = std::sqrt(mac.rho_f[i] * mac.rho_g[i]) - 1.0;
          sq2 += d * d;
        }
        errs.push_back(std::sqrt(err2 * grid.dx()));
        sq.push_back(sq2 * grid.dx());

        double nf = 0.0, ng = 0.0;
        for (int j = 0; j < grid.nv(); ++j) {
          nf += grid.wv(j) / chi1.values[j] *
                perp.f_perp.col(j).squaredNorm();
          ng += grid.wv(j) / chi2.values[j] *
                perp.g_perp.col(j).squaredNorm();
        }
        pf.push_back(nf * grid.dx());
        pg.push_back(ng * grid.dx());
      }
      entry.err_sup = *std::max_element(errs.begin(), errs.end());
      entry.perp_f = trapezoid(rec.times, pf);
      entry.perp_g = trapezoid(rec.times, pg);
      entry.sqrt_defect = std::sqrt(trapezoid(rec.times, sq));
      entry.cons_residual = rec.max_cons_residual;
    } catch (const std::exception& e) {
      entry.failed = true;
      entry.message = e.what();
    }
    report.entries.push_back(std::move(entry));
  }

  for (std::size_t k = 1; k < report.entries.size(); ++k) {
    auto& prev = report.entries[k - 1];
    auto& cur = report.entries[k];
    if (!prev.failed && !cur.failed && cur.err_sup > 0.0)
      cur.order = std::log(prev.err_sup / cur.err_sup) /
                  std::log(prev.eps / cur.eps);
  }
  return report;
}

std::string EpsSweepReport::to_csv() const {
  std::string out = "eps,err_sup,perp_f,perp_g,sqrt_defect,order\n";
  for (const auto& e : entries) {
    out += format_double(e.eps) + ',' + format_double(e.err_sup) + ',' +
           format_double(e.perp_f) + ',' + format_double(e.perp_g) + ',' +
           format_double(e.sqrt_defect) + ',' + format_double(e.order) + '\n';
  }
  return out;
}

std::string EpsSweepReport::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json row{{"eps", e.eps},
                       {"err_sup", e.err_sup},
                       {"perp_f", e.perp_f},
                       {"perp_g", e.perp_g},
                       {"sqrt_defect", e.sqrt_defect},
                       {"cons_residual", e.cons_residual},
                       {"failed", e.failed}};
    if (std::isfinite(e.order))
      row["order"] = e.order;
    if (e.failed)
      row["message"] = e.message;
    j.push_back(row);
  }
  return j.dump(2);
}

} // namespace kinlab
