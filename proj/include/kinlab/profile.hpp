#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "kinlab/grid.hpp"

namespace kinlab {

/// Discretized reaction profile chi on the velocity grid.
///
/// After build_profile the samples are even-symmetrized and renormalized so
/// the discrete identities hold exactly: mass = 1, mean_flux = 0. All other
/// structure (equilibria, entropy decay, coercivity constants) follows from
/// these two discrete identities, not from tail accuracy.
struct VelocityProfile {
  Eigen::VectorXd values; ///< chi(v_j) > 0 per node
  double mass = 0.0;      ///< integral of chi dv (quadrature)
  double mean_flux = 0.0; ///< integral of v chi dv
  double diffusion = 0.0; ///< D = integral of v^2 chi dv (scalar in 1-D)
};

enum class ProfileKind { Gaussian, PowerTail, CustomSamples };

struct ProfileSpec {
  ProfileKind kind = ProfileKind::Gaussian;
  double sigma = 1.0;              ///< Gaussian width
  double power = 2.0;              ///< PowerTail exponent k in (1+v^2)^-k
  std::vector<double> samples;     ///< CustomSamples values per v-node
};

/// Builds a profile from an analytic family or custom samples.
///
/// Rejects non-positive samples (with the offending node index) and, for the
/// analytic kinds, a vmax so small that the truncated tail holds more than
/// 1e-6 of the total mass. Custom samples carry no off-grid information, so
/// no tail check is applied to them.
VelocityProfile build_profile(const ProfileSpec& spec, const PhaseGrid& grid);

/// Relative mass beyond |v| > vmax for the analytic profile kinds,
/// tail / total, both by adaptive quadrature of the unnormalized density.
double profile_tail_fraction(const ProfileSpec& spec, double vmax);

struct ThetaFit {
  double theta = 0.0;   ///< fitted slope of log sup-integral vs log delta
  double constant = 0.0;///< fitted C in  sup-integral ~ C * delta^theta
  std::vector<double> measured; ///< sup integral per delta
};

/// Measures the thin-slab mass condition: for each delta, the sup over
/// offsets a (200 samples of [-vmax, vmax]) and directions omega in {+1,-1}
/// of the chi-mass of {|a + v*omega| < delta}, then fits a log-log line.
/// The slab integral uses exact integration of the piecewise-linear
/// reconstruction of chi, so the measured values are exactly monotone in
/// delta and meaningful below the node spacing.
ThetaFit theta_exponent(const VelocityProfile& chi, const PhaseGrid& grid,
                        const std::vector<double>& deltas);

} // namespace kinlab
