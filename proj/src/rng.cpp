#include "kinlab/rng.hpp"

#include <cmath>

namespace kinlab {

namespace {

// Probabilists' Hermite polynomials He_m(z) by recurrence, evaluated at
// z = v / sigma with sigma^2 the profile's second moment.
Eigen::MatrixXd hermite_table(const PhaseGrid& grid, double sigma, int m_max) {
  Eigen::MatrixXd H(grid.nv(), m_max);
  for (int j = 0; j < grid.nv(); ++j) {
    const double z = grid.v(j) / sigma;
    double hm2 = 0.0, hm1 = 1.0;
    H(j, 0) = 1.0;
    for (int m = 1; m < m_max; ++m) {
      const double h = z * hm1 - (m - 1) * hm2;
      H(j, m) = h;
      hm2 = hm1;
      hm1 = h;
    }
  }
  return H;
}

Eigen::MatrixXd random_component(Rng& rng, const PhaseGrid& grid,
                                 const VelocityProfile& chi, int kx_max,
                                 int mv_max) {
  const Eigen::MatrixXd H =
      hermite_table(grid, std::sqrt(chi.diffusion), mv_max);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(grid.nx(), grid.nv());
  Eigen::VectorXd xmode(grid.nx());
  for (int k = 0; k < kx_max; ++k) {
    const int n_phases = k == 0 ? 1 : 2;
    for (int p = 0; p < n_phases; ++p) {
      for (int i = 0; i < grid.nx(); ++i)
        xmode[i] = p == 0 ? std::cos(2.0 * M_PI * k * grid.x(i))
                          : std::sin(2.0 * M_PI * k * grid.x(i));
      Eigen::VectorXd vprof = Eigen::VectorXd::Zero(grid.nv());
      for (int m = 0; m < mv_max; ++m)
        vprof += rng.normal() * H.col(m);
      out += xmode * (vprof.cwiseProduct(chi.values)).transpose();
    }
  }
  return out;
}

} // namespace

DistributionPair band_limited_sample(Rng& rng, const PhaseGrid& grid,
                                     const VelocityProfile& chi1,
                                     const VelocityProfile& chi2, int kx_max,
                                     int mv_max) {
  DistributionPair F;
  F.f = random_component(rng, grid, chi1, kx_max, mv_max);
  F.g = random_component(rng, grid, chi2, kx_max, mv_max);
  return F;
}

} // namespace kinlab
