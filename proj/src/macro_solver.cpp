#include "kinlab/macro_solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kinlab {

double rho_of_m(double m) {
  const double r = std::sqrt(m * m + 4.0);
  return m >= 0.0 ? 0.5 * (m + r) : 2.0 / (r - m);
}

double m_of_rho(double rho) {
  if (!(rho > 0.0))
    throw std::invalid_argument("m_of_rho: rho must be positive");
  return rho - 1.0 / rho;
}

double diffusion_coefficient(double m, double d1, double d2) {
  const double rho = rho_of_m(m);
  const double rho2 = rho * rho;
  return (d1 * rho2 + d2 / rho2) / (rho + 1.0 / rho);
}

namespace {

/// Solves the periodic tridiagonal system (diag d, off-diagonals a to the
/// left and c to the right, plus the two torus corner entries) by the
/// Sherman-Morrison correction of the Thomas algorithm.
Eigen::VectorXd solve_periodic_tridiag(const Eigen::VectorXd& a,
                                       const Eigen::VectorXd& d,
                                       const Eigen::VectorXd& c,
                                       const Eigen::VectorXd& rhs) {
  const int n = static_cast<int>(d.size());
  auto thomas = [&](Eigen::VectorXd diag, Eigen::VectorXd b) {
    Eigen::VectorXd x(n);
    for (int i = 1; i < n; ++i) {
      const double w = a[i] / diag[i - 1];
      diag[i] -= w * c[i - 1];
      b[i] -= w * b[i - 1];
    }
    x[n - 1] = b[n - 1] / diag[n - 1];
    for (int i = n - 2; i >= 0; --i)
      x[i] = (b[i] - c[i] * x[i + 1]) / diag[i];
    return x;
  };

  // Corner entries: A[0][n-1] = a[0], A[n-1][0] = c[n-1].
  // A = B + u v^T with u = (gamma, 0, .., 0, c[n-1])^T, v = (1, 0, .., 0, a[0]/gamma)^T.
  const double gamma = -d[0];
  Eigen::VectorXd dmod = d;
  dmod[0] -= gamma;
  dmod[n - 1] -= c[n - 1] * a[0] / gamma;

  Eigen::VectorXd y = thomas(dmod, rhs);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  u[0] = gamma;
  u[n - 1] = c[n - 1];
  Eigen::VectorXd z = thomas(dmod, u);

  const double vy = y[0] + a[0] / gamma * y[n - 1];
  const double vz = z[0] + a[0] / gamma * z[n - 1];
  return y - (vy / (1.0 + vz)) * z;
}

bool try_backward_euler(const Eigen::VectorXd& m_old, double dt, double d1,
                        double d2, Eigen::VectorXd& m_new) {
  const int n = static_cast<int>(m_old.size());
  const double dx = 1.0 / n;
  const double r = dt / (dx * dx);

  Eigen::VectorXd m = m_old; // Picard iterate
  Eigen::VectorXd dcoef(n), a(n), d(n), c(n);
  for (int it = 0; it < 50; ++it) {
    for (int i = 0; i < n; ++i)
      dcoef[i] = diffusion_coefficient(m[i], d1, d2);
    for (int i = 0; i < n; ++i) {
      const double dl = 0.5 * (dcoef[(i + n - 1) % n] + dcoef[i]);
      const double dr = 0.5 * (dcoef[i] + dcoef[(i + 1) % n]);
      a[i] = -r * dl;
      c[i] = -r * dr;
      d[i] = 1.0 + r * (dl + dr);
    }
    Eigen::VectorXd next = solve_periodic_tridiag(a, d, c, m_old);
    const double incr = (next - m).norm();
    const double scale = next.norm() + 1e-300;
    m = next;
    if (incr <= 1e-10 * scale) {
      m_new = m;
      return true;
    }
  }
  return false;
}

Eigen::VectorXd step_recursive(const Eigen::VectorXd& m, double dt, double d1,
                               double d2, int depth) {
  Eigen::VectorXd out;
  if (try_backward_euler(m, dt, d1, d2, out))
    return out;
  if (depth >= 5)
    throw std::runtime_error(
        "diffusion_step: Picard iteration failed to converge after 5 "
        "step-halvings (dt = " + std::to_string(dt) + ")");
  Eigen::VectorXd half = step_recursive(m, 0.5 * dt, d1, d2, depth + 1);
  return step_recursive(half, 0.5 * dt, d1, d2, depth + 1);
}

} // namespace

MacroState diffusion_step(const MacroState& state, double dt, double d1,
                          double d2) {
  if (!(dt > 0.0))
    throw std::invalid_argument("diffusion_step: dt must be positive");
  if (state.m.size() < 3)
    throw std::invalid_argument("diffusion_step: need at least 3 cells");
  MacroState out;
  out.m = step_recursive(state.m, dt, d1, d2, 0);
  out.time = state.time + dt;
  return out;
}

MacroTrajectory run_diffusion(const MacroState& m0, double dt, double t_final,
                              double d1, double d2, int record_every) {
  const long n_steps =
      std::max<long>(1, std::lround(std::ceil(t_final / dt - 1e-12)));
  const double h = t_final / static_cast<double>(n_steps);

  MacroTrajectory traj;
  traj.times.push_back(m0.time);
  traj.states.push_back(m0.m);
  MacroState s = m0;
  for (long n = 1; n <= n_steps; ++n) {
    s = diffusion_step(s, h, d1, d2);
    if (n % record_every == 0 || n == n_steps) {
      traj.times.push_back(s.time);
      traj.states.push_back(s.m);
    }
  }
  return traj;
}

} // namespace kinlab
