#include "kinlab/profile.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kinlab {

namespace {

std::function<double(double)> sampler_for(const ProfileSpec& spec) {
  switch (spec.kind) {
  case ProfileKind::Gaussian: {
    const double s = spec.sigma;
    if (!(s > 0.0))
      throw std::invalid_argument("build_profile: gaussian sigma must be > 0");
    return [s](double v) {
      return std::exp(-0.5 * v * v / (s * s)) / (s * std::sqrt(2.0 * M_PI));
    };
  }
  case ProfileKind::PowerTail: {
    const double k = spec.power;
    if (!(k > 1.5))
      throw std::invalid_argument(
          "build_profile: power-tail exponent must exceed 1.5 so that "
          "(1+v^2)chi stays integrable");
    return [k](double v) { return std::pow(1.0 + v * v, -k); };
  }
  case ProfileKind::CustomSamples:
    throw std::logic_error("sampler_for: custom samples have no sampler");
  }
  throw std::logic_error("sampler_for: unknown kind");
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  const double m = 0.5 * (a + b);
  return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 40);
}

} // namespace

double profile_tail_fraction(const ProfileSpec& spec, double vmax) {
  if (spec.kind == ProfileKind::CustomSamples)
    return 0.0;
  auto f = sampler_for(spec);
  // Extend the outer integration bound until the tail stops growing.
  double hi = std::max(4.0 * vmax, vmax + 40.0);
  double tail = integrate(f, vmax, hi, 1e-14);
  for (int pass = 0; pass < 12; ++pass) {
    const double more = integrate(f, hi, 2.0 * hi, 1e-14);
    hi *= 2.0;
    tail += more;
    if (more < 1e-13 * (tail + 1e-300))
      break;
  }
  const double core = integrate(f, 0.0, vmax, 1e-14);
  return tail / (core + tail); // profiles here are even, halves suffice
}

VelocityProfile build_profile(const ProfileSpec& spec, const PhaseGrid& grid) {
  const int nv = grid.nv();
  Eigen::VectorXd raw(nv);

  if (spec.kind == ProfileKind::CustomSamples) {
    if (static_cast<int>(spec.samples.size()) != nv)
      throw std::invalid_argument(
          "build_profile: custom sample count " +
          std::to_string(spec.samples.size()) + " does not match nv = " +
          std::to_string(nv));
    for (int j = 0; j < nv; ++j)
      raw[j] = spec.samples[j];
  } else {
    auto f = sampler_for(spec);
    for (int j = 0; j < nv; ++j)
      raw[j] = f(grid.v(j));
    const double tail = profile_tail_fraction(spec, grid.vmax());
    if (tail > 1e-6)
      throw std::invalid_argument(
          "build_profile: truncated tail mass fraction " +
          std::to_string(tail) +
          " exceeds 1e-6; increase vmax");
  }

  for (int j = 0; j < nv; ++j) {
    if (!(raw[j] > 0.0) || !std::isfinite(raw[j]))
      throw std::invalid_argument(
          "build_profile: non-positive sample at velocity node " +
          std::to_string(j) + " (v = " + std::to_string(grid.v(j)) + ")");
  }

  // Even symmetrization: forces all odd moments to zero exactly while
  // preserving positivity.
  VelocityProfile p;
  p.values.resize(nv);
  for (int j = 0; j < nv; ++j)
    p.values[j] = 0.5 * (raw[j] + raw[grid.mirror(j)]);

  double mass = 0.0;
  for (int j = 0; j < nv; ++j)
    mass += grid.wv(j) * p.values[j];
  p.values /= mass;

  p.mass = 0.0;
  p.mean_flux = 0.0;
  p.diffusion = 0.0;
  for (int j = 0; j < nv; ++j) {
    const double w = grid.wv(j), v = grid.v(j);
    p.mass += w * p.values[j];
    p.mean_flux += w * v * p.values[j];
    p.diffusion += w * v * v * p.values[j];
  }
  return p;
}

namespace {

/// Integral over [lo, hi] of the piecewise-linear reconstruction of chi:
/// linear between nodes, constant on the outer half-cells, zero beyond.
double slab_integral(const Eigen::VectorXd& chi, const PhaseGrid& grid,
                     double lo, double hi) {
  const int nv = grid.nv();
  const double dv = grid.dv();
  const double edge_lo = grid.v(0) - 0.5 * dv;
  const double edge_hi = grid.v(nv - 1) + 0.5 * dv;
  lo = std::max(lo, edge_lo);
  hi = std::min(hi, edge_hi);
  if (hi <= lo)
    return 0.0;

  auto seg = [&](double fa, double fb, double va, double vb) {
    // contribution of [max(lo,va), min(hi,vb)] of the chord (va,fa)-(vb,fb)
    const double s = std::max(lo, va), t = std::min(hi, vb);
    if (t <= s)
      return 0.0;
    const double slope = (fb - fa) / (vb - va);
    const double fs = fa + slope * (s - va), ft = fa + slope * (t - va);
    return 0.5 * (fs + ft) * (t - s);
  };

  double acc = seg(chi[0], chi[0], edge_lo, grid.v(0));
  for (int j = 0; j + 1 < nv; ++j)
    acc += seg(chi[j], chi[j + 1], grid.v(j), grid.v(j + 1));
  acc += seg(chi[nv - 1], chi[nv - 1], grid.v(nv - 1), edge_hi);
  return acc;
}

} // namespace

ThetaFit theta_exponent(const VelocityProfile& chi, const PhaseGrid& grid,
                        const std::vector<double>& deltas) {
  if (deltas.size() < 4)
    throw std::invalid_argument("theta_exponent: need at least 4 deltas");
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
  for (double d : deltas) {
    if (!(d > 0.0))
      throw std::invalid_argument("theta_exponent: deltas must be positive");
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  // nominally 1.5 decades; 1.45 admits the canonical [1e-2, 3e-1] range
  if (dmax / dmin < std::pow(10.0, 1.45))
    throw std::invalid_argument(
        "theta_exponent: deltas must span at least 1.5 decades");

  const int n_offsets = 200;
  ThetaFit fit;
  fit.measured.reserve(deltas.size());
  for (double d : deltas) {
    double sup = 0.0;
    for (int io = 0; io < n_offsets; ++io) {
      const double a = -grid.vmax() +
                       2.0 * grid.vmax() * io / (n_offsets - 1);
      // omega = +1: slab |a+v| < d; omega = -1: slab |a-v| < d
      sup = std::max(sup, slab_integral(chi.values, grid, -a - d, -a + d));
      sup = std::max(sup, slab_integral(chi.values, grid, a - d, a + d));
    }
    fit.measured.push_back(sup);
  }

  // Least squares on log(measured) = log C + theta * log(delta).
  const int n = static_cast<int>(deltas.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(deltas[i]), y = std::log(fit.measured[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  fit.theta = (n * sxy - sx * sy) / denom;
  fit.constant = std::exp((sy - fit.theta * sx) / n);
  return fit;
}

} // namespace kinlab
