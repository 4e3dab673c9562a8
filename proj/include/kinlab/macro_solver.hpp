#pragma once

#include <Eigen/Dense>
#include <vector>

namespace kinlab {

/// Scalar field m(x) for the limiting diffusion equation
/// dm/dt = d/dx ( D(m) dm/dx ) on the unit torus.
struct MacroState {
  Eigen::VectorXd m;
  double time = 0.0;
};

/// rho(m) = (m + sqrt(m^2+4))/2, evaluated on the cancellation-free branch
/// for m < 0. Always positive.
double rho_of_m(double m);

/// m(rho) = rho - 1/rho for rho > 0. Inverse of rho_of_m.
double m_of_rho(double rho);

/// D(m) = (D1 rho^2 + D2/rho^2) / (rho + 1/rho) with rho = rho_of_m(m).
/// The denominator equals 2 rho - m and is bounded below by 2.
double diffusion_coefficient(double m, double d1, double d2);

/// One backward-Euler step of the conservative finite-volume scheme with
/// arithmetic face averaging of D(m). The nonlinear system is solved by
/// Picard iteration (lagged coefficients, periodic tridiagonal solves); on
/// non-convergence the step is bisected, up to 5 levels.
MacroState diffusion_step(const MacroState& state, double dt, double d1,
                          double d2);

struct MacroTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
};

MacroTrajectory run_diffusion(const MacroState& m0, double dt, double t_final,
                              double d1, double d2, int record_every = 1);

} // namespace kinlab
