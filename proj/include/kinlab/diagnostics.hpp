#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "kinlab/kinetic_solver.hpp"
#include "kinlab/state.hpp"

namespace kinlab {

/// Entropy relative to the global equilibrium with the given rho_inf:
/// integral of  f ln(f/(rho chi1)) - f + rho chi1
///            + g ln(rho g/chi2)  - g + chi2/rho  dv dx,  rho = rho_inf.
/// Nonnegative, zero exactly at the equilibrium. Requires f, g > 0.
double relative_entropy(const DistributionPair& F, double rho_inf,
                        const VelocityProfile& chi1,
                        const VelocityProfile& chi2, const PhaseGrid& grid);

/// The entropy production integral
///   integral of (chi1 chi2' - f g') ln( f g' / (chi1 chi2') ) dv' dv dx,
/// accumulated termwise as -(fg' - chi chi') (ln fg' - ln chi chi') so every
/// summand is nonpositive in exact arithmetic. Requires f, g > 0.
double entropy_dissipation(const DistributionPair& F,
                           const VelocityProfile& chi1,
                           const VelocityProfile& chi2, const PhaseGrid& grid);

struct DecayFit {
  double lambda = 0.0; ///< decay rate (negated log-slope)
  double r2 = 0.0;     ///< coefficient of determination of the log fit
};

/// Least-squares exponential rate over the trailing `window` fraction of
/// the samples (by time). Values must be positive there.
DecayFit fit_decay_rate(const std::vector<double>& times,
                        const std::vector<double>& values,
                        double window = 0.5);

struct EpsSweepEntry {
  double eps = 0.0;
  double err_sup = 0.0;     ///< sup over records of ||(rho_f-rho_g) - m||_L2
  double perp_f = 0.0;      ///< time integral of ||f_perp||^2 in L2(dx dv/chi1)
  double perp_g = 0.0;
  double sqrt_defect = 0.0; ///< ||sqrt(rho_f rho_g) - 1||_{L2(x,t)}
  double cons_residual = 0.0;
  double order = std::numeric_limits<double>::quiet_NaN(); ///< vs previous eps
  bool failed = false;
  std::string message;
};

struct EpsSweepReport {
  std::vector<EpsSweepEntry> entries;
  std::string to_csv() const;
  std::string to_json() const;
};

struct LimitStudyOptions {
  double t_macro = 0.2;   ///< final macroscopic time
  double dt_coef = 0.05;  ///< dt = dt_coef * eps^2 (adjusted to hit records)
  int n_records = 40;
  int macro_refine = 4;   ///< refinement factor of the diffusion grid
  double macro_dt = 2.5e-5;
};

/// Runs the rescaled kinetic system for each eps from well-prepared data
/// f0 = rho0 chi1, g0 = chi2/rho0, runs the limit diffusion equation from
/// m0 = m_of_rho(rho0), and quantifies the distance between the two along
/// with the micro-part norms. Failing eps entries are recorded and the
/// remaining ones still run.
EpsSweepReport limit_study(const std::function<double(double)>& rho0,
                           const std::vector<double>& eps_list,
                           const PhaseGrid& grid, const VelocityProfile& chi1,
                           const VelocityProfile& chi2,
                           const LimitStudyOptions& opt = {});

} // namespace kinlab
