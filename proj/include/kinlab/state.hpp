#pragma once

#include <Eigen/Dense>

#include "kinlab/grid.hpp"
#include "kinlab/profile.hpp"

namespace kinlab {

/// The kinetic state F = (f, g) on the tensor grid. Matrices are nx-by-nv;
/// column j holds the x-profile at velocity node j (contiguous for the
/// per-column spectral transforms). Also used for linearized perturbations,
/// which may be negative.
struct DistributionPair {
  Eigen::MatrixXd f;
  Eigen::MatrixXd g;
  double time = 0.0;
  double eps = 1.0;

  static DistributionPair zero(const PhaseGrid& grid) {
    DistributionPair F;
    F.f = Eigen::MatrixXd::Zero(grid.nx(), grid.nv());
    F.g = Eigen::MatrixXd::Zero(grid.nx(), grid.nv());
    return F;
  }
};

/// Position densities (rho_f, rho_g) per x-node.
struct MacroPair {
  Eigen::VectorXd rho_f;
  Eigen::VectorXd rho_g;
};

/// Micro parts of the decomposition f = rho_f chi_1 + eps f_perp.
/// Both components have zero v-mean at every x.
struct PerpPair {
  Eigen::MatrixXd f_perp;
  Eigen::MatrixXd g_perp;
};

/// rho_h(x) = integral of h dv, by the grid quadrature.
MacroPair density(const DistributionPair& F, const PhaseGrid& grid);

/// First moments (integral of v f dv, integral of v g dv) per x-node.
struct FluxPair {
  Eigen::VectorXd jf;
  Eigen::VectorXd jg;
};
FluxPair flux(const DistributionPair& F, const PhaseGrid& grid);

/// The unique positive root of rho - 1/rho = mass_difference / volume.
double rho_infinity(double mass_difference, double volume = 1.0);

/// Global equilibrium (rho_inf chi_1, chi_2 / rho_inf).
DistributionPair equilibrium(double rho_inf, const VelocityProfile& chi1,
                             const VelocityProfile& chi2,
                             const PhaseGrid& grid);

/// Splits F into macro densities and the O(eps) micro remainder.
/// Reconstruction f = rho_f chi_1 + eps f_perp is exact to round-off.
std::pair<MacroPair, PerpPair>
micro_macro_split(const DistributionPair& F, double eps,
                  const VelocityProfile& chi1, const VelocityProfile& chi2,
                  const PhaseGrid& grid);

/// Total mass difference integral of (f - g) dv dx.
double mass_difference(const DistributionPair& F, const PhaseGrid& grid);

} // namespace kinlab
