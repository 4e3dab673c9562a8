#include "kinlab/state.hpp"

#include <cmath>
#include <stdexcept>

namespace kinlab {

MacroPair density(const DistributionPair& F, const PhaseGrid& grid) {
  MacroPair m;
  m.rho_f = F.f * Eigen::VectorXd::Constant(grid.nv(), grid.dv());
  m.rho_g = F.g * Eigen::VectorXd::Constant(grid.nv(), grid.dv());
  return m;
}

FluxPair flux(const DistributionPair& F, const PhaseGrid& grid) {
  Eigen::VectorXd vw(grid.nv());
  for (int j = 0; j < grid.nv(); ++j)
    vw[j] = grid.wv(j) * grid.v(j);
  FluxPair J;
  J.jf = F.f * vw;
  J.jg = F.g * vw;
  return J;
}

double rho_infinity(double mass_difference, double volume) {
  if (!(volume > 0.0))
    throw std::invalid_argument("rho_infinity: volume must be positive");
  const double mu = mass_difference / volume;
  if (!std::isfinite(mu))
    throw std::invalid_argument("rho_infinity: non-finite mass difference");
  // Stable branch of (mu + sqrt(mu^2+4))/2 for either sign of mu.
  const double r = std::sqrt(mu * mu + 4.0);
  return mu >= 0.0 ? 0.5 * (mu + r) : 2.0 / (r - mu);
}

DistributionPair equilibrium(double rho_inf, const VelocityProfile& chi1,
                             const VelocityProfile& chi2,
                             const PhaseGrid& grid) {
  if (!(rho_inf > 0.0))
    throw std::invalid_argument("equilibrium: rho_inf must be positive");
  DistributionPair F;
  F.f = Eigen::VectorXd::Ones(grid.nx()) * (rho_inf * chi1.values.transpose());
  F.g = Eigen::VectorXd::Ones(grid.nx()) *
        (chi2.values.transpose() / rho_inf);
  return F;
}

std::pair<MacroPair, PerpPair>
micro_macro_split(const DistributionPair& F, double eps,
                  const VelocityProfile& chi1, const VelocityProfile& chi2,
                  const PhaseGrid& grid) {
  if (!(eps > 0.0))
    throw std::invalid_argument("micro_macro_split: eps must be positive");
  MacroPair m = density(F, grid);
  PerpPair p;
  p.f_perp = (F.f - m.rho_f * chi1.values.transpose()) / eps;
  p.g_perp = (F.g - m.rho_g * chi2.values.transpose()) / eps;
  return {std::move(m), std::move(p)};
}

double mass_difference(const DistributionPair& F, const PhaseGrid& grid) {
  return (F.f.sum() - F.g.sum()) * grid.dx() * grid.dv();
}

} // namespace kinlab
