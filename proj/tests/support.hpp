#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here is deliberately written with direct loops and textbook formulas,
// independent of the library's own evaluation paths.

#include <cmath>
#include <functional>
#include <vector>

#include "kinlab/grid.hpp"
#include "kinlab/profile.hpp"
#include "kinlab/state.hpp"

namespace testsup {

inline kinlab::PhaseGrid small_grid(int nx = 16, int nv = 16,
                                    double vmax = 8.0) {
  return kinlab::PhaseGrid(nx, nv, vmax);
}

inline kinlab::VelocityProfile gaussian_profile(const kinlab::PhaseGrid& g,
                                                double sigma = 1.0) {
  kinlab::ProfileSpec spec;
  spec.kind = kinlab::ProfileKind::Gaussian;
  spec.sigma = sigma;
  return kinlab::build_profile(spec, g);
}

/// Plain-loop quadrature of integral of h(v) chi(v) dv against the grid
/// measure (oracle for cached moments and densities).
inline double oracle_v_integral(const kinlab::PhaseGrid& g,
                                const Eigen::VectorXd& values,
                                const std::function<double(double)>& h) {
  double acc = 0.0;
  for (int j = 0; j < g.nv(); ++j)
    acc += g.wv(j) * h(g.v(j)) * values[j];
  return acc;
}

/// High-resolution trapezoid integral on [a, b], used as the independent
/// tail-mass oracle.
inline double oracle_trapezoid(const std::function<double(double)>& f,
                               double a, double b, int n = 400000) {
  double acc = 0.5 * (f(a) + f(b));
  const double h = (b - a) / n;
  for (int i = 1; i < n; ++i)
    acc += f(a + i * h);
  return acc * h;
}

/// Observed convergence order from three errors at step halvings.
inline double richardson_order(double e1, double e2) {
  return std::log2(e1 / e2);
}

/// Least-squares slope of y against x (log-log theta oracle, rate checks).
inline double oracle_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

} // namespace testsup
