#include "kinlab/linear_ops.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "kinlab/numfmt.hpp"
#include "kinlab/rng.hpp"

namespace kinlab {

LinearOps::LinearOps(const PhaseGrid& grid, VelocityProfile chi1,
                     VelocityProfile chi2, double rho_inf)
    : grid_(grid), chi1_(std::move(chi1)), chi2_(std::move(chi2)),
      rho_inf_(rho_inf), tx_(grid.nx()) {
  if (!(rho_inf > 0.0))
    throw std::invalid_argument("LinearOps: rho_inf must be positive");
  const double r2 = rho_inf_ * rho_inf_;
  d0_ = (r2 * chi1_.diffusion + chi2_.diffusion) / (r2 + 1.0);
}

double LinearOps::inner(const DistributionPair& F,
                        const DistributionPair& G) const {
  if (F.f.rows() != grid_.nx() || F.f.cols() != grid_.nv() ||
      G.f.rows() != grid_.nx() || G.f.cols() != grid_.nv())
    throw std::invalid_argument("inner: state does not match the grid");
  double acc = 0.0;
  for (int j = 0; j < grid_.nv(); ++j) {
    const double wf = grid_.wv(j) / (rho_inf_ * chi1_.values[j]);
    const double wg = grid_.wv(j) * rho_inf_ / chi2_.values[j];
    acc += wf * F.f.col(j).dot(G.f.col(j)) + wg * F.g.col(j).dot(G.g.col(j));
  }
  return acc * grid_.dx();
}

double LinearOps::norm(const DistributionPair& F) const {
  return std::sqrt(std::max(0.0, inner(F, F)));
}

DistributionPair LinearOps::apply_L(const DistributionPair& F) const {
  MacroPair m = density(F, grid_);
  DistributionPair out;
  out.f = -rho_inf_ * (m.rho_g * chi1_.values.transpose()) - F.f / rho_inf_;
  out.g = -(m.rho_f * chi2_.values.transpose()) / rho_inf_ - rho_inf_ * F.g;
  return out;
}

DistributionPair LinearOps::apply_Lambda(const DistributionPair& F) const {
  DistributionPair out;
  out.f = F.f / rho_inf_;
  out.g = rho_inf_ * F.g;
  return out;
}

DistributionPair LinearOps::apply_K(const DistributionPair& F) const {
  MacroPair m = density(F, grid_);
  DistributionPair out;
  out.f = -rho_inf_ * (m.rho_g * chi1_.values.transpose());
  out.g = -(m.rho_f * chi2_.values.transpose()) / rho_inf_;
  return out;
}

DistributionPair LinearOps::apply_Pi(const DistributionPair& F) const {
  MacroPair m = density(F, grid_);
  const double r2 = rho_inf_ * rho_inf_;
  Eigen::VectorXd coef = (m.rho_f - m.rho_g) / (r2 + 1.0);
  DistributionPair out;
  out.f = coef * (r2 * chi1_.values.transpose());
  out.g = -(coef * chi2_.values.transpose());
  return out;
}

DistributionPair LinearOps::apply_T(const DistributionPair& F) {
  DistributionPair out = DistributionPair::zero(grid_);
  Eigen::VectorXd der(grid_.nx());
  for (int j = 0; j < grid_.nv(); ++j) {
    tx_.derivative(F.f.col(j), der);
    out.f.col(j) = grid_.v(j) * der;
    tx_.derivative(F.g.col(j), der);
    out.g.col(j) = grid_.v(j) * der;
  }
  return out;
}

Eigen::VectorXd LinearOps::elliptic_solve(const Eigen::VectorXd& u,
                                          double d0) {
  if (!(d0 >= 0.0))
    throw std::invalid_argument("elliptic_solve: d0 must be nonnegative");
  Eigen::VectorXd out = u;
  tx_.elliptic_inverse(out, d0);
  return out;
}

DistributionPair LinearOps::apply_A(const DistributionPair& F) {
  // (T Pi)* F = -d/dx of the flux-difference moment, carried on the
  // local-equilibrium profile; the inverse acts as the scalar elliptic
  // solve on that macroscopic field.
  FluxPair J = flux(F, grid_);
  Eigen::VectorXd jdiff = J.jf - J.jg;
  Eigen::VectorXd w(grid_.nx());
  tx_.derivative(jdiff, w);
  w = -w;
  tx_.elliptic_inverse(w, d0_);

  const double r2 = rho_inf_ * rho_inf_;
  DistributionPair out;
  out.f = w * (r2 / (r2 + 1.0) * chi1_.values.transpose());
  out.g = -(w * (chi2_.values.transpose() / (r2 + 1.0)));
  return out;
}

ModifiedEntropyValue LinearOps::modified_entropy(const DistributionPair& F,
                                                 double delta) {
  if (delta < 0.0)
    throw std::invalid_argument("modified_entropy: delta must be >= 0");
  const double n2 = inner(F, F);
  ModifiedEntropyValue h;
  h.value = 0.5 * n2 + delta * inner(apply_A(F), F);
  h.lower = 0.5 * (1.0 - delta) * n2;
  h.upper = 0.5 * (1.0 + delta) * n2;
  const double slack = 1e-12 * (1.0 + n2);
  h.bracket_ok =
      delta >= 1.0 || (h.value >= h.lower - slack && h.value <= h.upper + slack);
  return h;
}

DistributionPair LinearOps::dx(const DistributionPair& F) {
  DistributionPair out = DistributionPair::zero(grid_);
  Eigen::VectorXd der(grid_.nx());
  for (int j = 0; j < grid_.nv(); ++j) {
    tx_.derivative(F.f.col(j), der);
    out.f.col(j) = der;
    tx_.derivative(F.g.col(j), der);
    out.g.col(j) = der;
  }
  return out;
}

DistributionPair LinearOps::dv(const DistributionPair& F) const {
  const int nv = grid_.nv();
  const double h2 = 2.0 * grid_.dv();
  auto diff = [&](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd d(m.rows(), nv);
    d.col(0) = (-3.0 * m.col(0) + 4.0 * m.col(1) - m.col(2)) / h2;
    for (int j = 1; j < nv - 1; ++j)
      d.col(j) = (m.col(j + 1) - m.col(j - 1)) / h2;
    d.col(nv - 1) =
        (3.0 * m.col(nv - 1) - 4.0 * m.col(nv - 2) + m.col(nv - 3)) / h2;
    return d;
  };
  DistributionPair out;
  out.f = diff(F.f);
  out.g = diff(F.g);
  return out;
}

double LinearOps::h1_functional(const DistributionPair& F, double delta) {
  if (delta >= 2.0)
    throw std::invalid_argument(
        "h1_functional: delta >= 2 cannot give a positive form "
        "(Cauchy-Schwarz bound)");
  DistributionPair Fx = dx(F);
  DistributionPair Fv = dv(F);
  return inner(F, F) + inner(Fx, Fx) + inner(Fv, Fv) +
         delta * inner(Fx, Fv);
}

LinearTrajectory LinearOps::solve_linearized(const DistributionPair& F0,
                                             double dt, double t_final,
                                             double delta, int record_every) {
  if (!(dt > 0.0) || !(t_final > 0.0))
    throw std::invalid_argument("solve_linearized: dt, t_final must be > 0");
  const double md = mass_difference(F0, grid_);
  if (std::abs(md) > 1e-10)
    std::cerr << "solve_linearized: warning: initial mass difference "
              << md << " is nonzero; decay targets a shifted equilibrium\n";

  const long n_steps =
      std::max<long>(1, std::lround(std::ceil(t_final / dt - 1e-12)));
  const double h = t_final / static_cast<double>(n_steps);

  const double rho = rho_inf_;
  const double kap = rho + 1.0 / rho;
  // Reaction substep factors are x-independent.
  const double E1_h = std::exp(-h / rho);   // factor on f
  const double E2_h = std::exp(-rho * h);   // factor on g
  const double Ek_h = std::exp(-kap * h);

  auto reaction = [&](DistributionPair& F) {
    MacroPair m = density(F, grid_);
    for (int i = 0; i < grid_.nx(); ++i) {
      const double rf0 = m.rho_f[i], rg0 = m.rho_g[i];
      const double sigma0 = rf0 / rho + rho * rg0;
      const double beta = sigma0 / kap;
      const double af = rf0 - beta;
      const double ag = rg0 - beta;
      const double src_f = beta * (Ek_h - E1_h) - ag * rho * rho * (1.0 - E1_h);
      const double src_g =
          beta * (Ek_h - E2_h) - af * (1.0 - E2_h) / (rho * rho);
      F.f.row(i) = E1_h * F.f.row(i) + src_f * chi1_.values.transpose();
      F.g.row(i) = E2_h * F.g.row(i) + src_g * chi2_.values.transpose();
    }
  };

  auto transport_half = [&](DistributionPair& F) {
    for (int j = 0; j < grid_.nv(); ++j) {
      const double s = grid_.v(j) * 0.5 * h;
      tx_.shift(F.f.col(j), s);
      tx_.shift(F.g.col(j), s);
    }
  };

  LinearTrajectory traj;
  auto record = [&](const DistributionPair& F, double t) {
    traj.times.push_back(t);
    traj.norm.push_back(norm(F));
    traj.h_mod.push_back(modified_entropy(F, delta).value);
    traj.h1_mod.push_back(h1_functional(F, delta));
  };

  DistributionPair F = F0;
  record(F, 0.0);
  for (long n = 1; n <= n_steps; ++n) {
    transport_half(F);
    reaction(F);
    transport_half(F);
    if (!F.f.allFinite() || !F.g.allFinite())
      throw std::runtime_error("solve_linearized: non-finite state at t = " +
                               std::to_string(n * h));
    if (n % record_every == 0 || n == n_steps)
      record(F, n * h);
  }
  return traj;
}

std::string to_string(OperatorLabel label) {
  switch (label) {
  case OperatorLabel::T: return "T";
  case OperatorLabel::L: return "L";
  case OperatorLabel::Pi: return "Pi";
  case OperatorLabel::Lambda: return "Lambda";
  case OperatorLabel::K: return "K";
  case OperatorLabel::A: return "A";
  case OperatorLabel::TPi: return "TPi";
  }
  return "?";
}

Eigen::VectorXd pack(const DistributionPair& F, const PhaseGrid& grid) {
  const int nx = grid.nx(), nv = grid.nv();
  Eigen::VectorXd x(2 * nx * nv);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nv; ++j) {
      x[i * nv + j] = F.f(i, j);
      x[nx * nv + i * nv + j] = F.g(i, j);
    }
  return x;
}

DistributionPair unpack(const Eigen::VectorXd& x, const PhaseGrid& grid) {
  const int nx = grid.nx(), nv = grid.nv();
  DistributionPair F = DistributionPair::zero(grid);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nv; ++j) {
      F.f(i, j) = x[i * nv + j];
      F.g(i, j) = x[nx * nv + i * nv + j];
    }
  return F;
}

Eigen::VectorXd weight_diagonal(const PhaseGrid& grid,
                                const VelocityProfile& chi1,
                                const VelocityProfile& chi2, double rho_inf) {
  const int nx = grid.nx(), nv = grid.nv();
  Eigen::VectorXd w(2 * nx * nv);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nv; ++j) {
      const double cell = grid.dx() * grid.wv(j);
      w[i * nv + j] = cell / (rho_inf * chi1.values[j]);
      w[nx * nv + i * nv + j] = cell * rho_inf / chi2.values[j];
    }
  return w;
}

DenseOperator assemble_dense(LinearOps& ops, OperatorLabel which) {
  const PhaseGrid& grid = ops.grid();
  const int n = 2 * grid.nx() * grid.nv();
  if (n > 8192)
    throw std::invalid_argument(
        "assemble_dense: 2*nx*nv = " + std::to_string(n) +
        " exceeds the 8192 size guard");

  auto apply = [&](const DistributionPair& F) {
    switch (which) {
    case OperatorLabel::T: return ops.apply_T(F);
    case OperatorLabel::L: return ops.apply_L(F);
    case OperatorLabel::Pi: return ops.apply_Pi(F);
    case OperatorLabel::Lambda: return ops.apply_Lambda(F);
    case OperatorLabel::K: return ops.apply_K(F);
    case OperatorLabel::A: return ops.apply_A(F);
    case OperatorLabel::TPi: return ops.apply_T(ops.apply_Pi(F));
    }
    throw std::logic_error("assemble_dense: unknown label");
  };

  DenseOperator op;
  op.label = which;
  op.mat.resize(n, n);
  Eigen::VectorXd basis = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    basis[k] = 1.0;
    op.mat.col(k) = pack(apply(unpack(basis, grid)), grid);
    basis[k] = 0.0;
  }
  return op;
}

bool CoercivityReport::all_pass() const {
  for (const auto& e : entries)
    if (!e.informational && !e.pass)
      return false;
  return true;
}

std::string CoercivityReport::to_text() const {
  std::string out;
  for (const auto& e : entries) {
    out += e.name + " = " + format_double(e.value) + " | " +
           (e.pass ? "pass" : "fail") + "\n";
  }
  return out;
}

namespace {

struct SampledBounds {
  double p1_min = 1e300;
  double a_bound_max = 0.0;
  double p3_max = 0.0;
  double p4_at_max = 0.0;
  double p4_al_max = 0.0;
  double h11_max = 0.0;
  double h12_min = 1e300;
  double h13_min = 1e300;
  Eigen::VectorXd p1_witness;
  Eigen::VectorXd a_witness;
};

SampledBounds sample_bounds(LinearOps& ops, int n_samples, Rng rng,
                            std::vector<std::pair<double, double>>* gain,
                            const std::vector<double>& gain_deltas) {
  SampledBounds b;
  if (gain)
    gain->assign(gain_deltas.size(), {0.0, 0.0});
  DistributionPair prev;
  bool have_prev = false;
  for (int s = 0; s < n_samples; ++s) {
    DistributionPair F = band_limited_sample(rng, ops.grid(), ops.chi1(),
                                             ops.chi2());
    const double nrm2 = ops.inner(F, F);
    if (nrm2 < 1e-300)
      continue;

    DistributionPair PiF = ops.apply_Pi(F);
    DistributionPair micro;
    micro.f = F.f - PiF.f;
    micro.g = F.g - PiF.g;
    const double micro2 = ops.inner(micro, micro);

    DistributionPair LF = ops.apply_L(F);
    if (micro2 > 1e-12 * nrm2) {
      const double ratio = -ops.inner(LF, F) / micro2;
      if (ratio < b.p1_min) {
        b.p1_min = ratio;
        b.p1_witness = pack(F, ops.grid());
      }
      const double a_ratio = ops.norm(ops.apply_A(F)) / std::sqrt(micro2);
      if (a_ratio > b.a_bound_max) {
        b.a_bound_max = a_ratio;
        b.a_witness = pack(F, ops.grid());
      }
      b.p4_at_max = std::max(
          b.p4_at_max, ops.norm(ops.apply_A(ops.apply_T(micro))) /
                           std::sqrt(micro2));
      b.p4_al_max = std::max(
          b.p4_al_max, ops.norm(ops.apply_A(LF)) / std::sqrt(micro2));
    }

    b.p3_max = std::max(b.p3_max,
                        ops.norm(ops.apply_Pi(ops.apply_T(PiF))) /
                            std::sqrt(nrm2));
    b.h12_min = std::min(b.h12_min, ops.inner(ops.apply_Lambda(F), F) / nrm2);

    DistributionPair Fv = ops.dv(F);
    const double nv2 = ops.inner(Fv, Fv);
    if (nv2 > 1e-12 * nrm2) {
      b.h13_min = std::min(
          b.h13_min, ops.inner(ops.apply_Lambda(Fv), Fv) / nv2);
      if (gain) {
        DistributionPair Kv = ops.dv(ops.apply_K(F));
        const double cross = std::abs(ops.inner(Kv, Fv));
        for (std::size_t d = 0; d < gain_deltas.size(); ++d) {
          const double c =
              std::max(0.0, (cross - gain_deltas[d] * nv2) / nrm2);
          (*gain)[d].second = std::max((*gain)[d].second, c);
          (*gain)[d].first = gain_deltas[d];
        }
      }
    }

    if (have_prev) {
      const double denom = ops.norm(F) * ops.norm(prev);
      if (denom > 1e-300)
        b.h11_max =
            std::max(b.h11_max, std::abs(ops.inner(LF, prev)) / denom);
    }
    prev = F;
    have_prev = true;
  }
  return b;
}

} // namespace

CoercivityReport coercivity_report(const PhaseGrid& grid,
                                   const ProfileSpec& spec1,
                                   const ProfileSpec& spec2, double rho_inf,
                                   int n_samples, std::uint64_t seed) {
  CoercivityReport rep;
  Rng root(seed);

  LinearOps ops(grid, build_profile(spec1, grid), build_profile(spec2, grid),
                rho_inf);
  const double cmin = std::min(rho_inf, 1.0 / rho_inf);
  const double cmax = std::max(rho_inf, 1.0 / rho_inf);

  const std::vector<double> gain_deltas{0.5, 0.1, 0.02};
  std::vector<std::pair<double, double>> gain;
  SampledBounds b =
      sample_bounds(ops, n_samples, root.split(1), &gain, gain_deltas);

  auto add = [&](const std::string& name, double value, bool pass,
                 bool informational = false,
                 const Eigen::VectorXd* witness = nullptr) {
    CoercivityEntry e;
    e.name = name;
    e.value = value;
    e.pass = pass;
    e.informational = informational;
    if (witness && !pass)
      e.witness = *witness;
    rep.entries.push_back(std::move(e));
  };

  add("P1_lambda_m", b.p1_min, b.p1_min >= cmin - 1e-6, false,
      &b.p1_witness);
  add("A_bound", b.a_bound_max, b.a_bound_max <= 0.5 + 1e-9, false,
      &b.a_witness);
  add("P3_PiTPi", b.p3_max, b.p3_max <= 1e-10);
  add("H1_1_L_bound", b.h11_max, b.h11_max <= 4.0 * cmax + 1e-9);
  add("H1_2_loss_coercivity", b.h12_min, b.h12_min >= cmin - 1e-9);
  add("H1_3_loss_coercivity_dv", b.h13_min, b.h13_min >= cmin - 1e-9);
  for (std::size_t d = 0; d < gain.size(); ++d)
    add("H2_gain_C_delta_" + std::to_string(gain[d].first).substr(0, 4),
        gain[d].second, std::isfinite(gain[d].second));

  // (P2) macroscopic coercivity by the dense generalized eigenproblem on
  // the mean-zero macroscopic subspace. The Nyquist x-mode is excluded: the
  // discrete derivative annihilates it, so it carries no transport signal.
  {
    const int nx = grid.nx();
    const double r2 = rho_inf * rho_inf;
    std::vector<Eigen::VectorXd> basis_u;
    for (int k = 1; k <= nx / 2 - 1; ++k) {
      Eigen::VectorXd uc(nx), us(nx);
      for (int i = 0; i < nx; ++i) {
        uc[i] = std::cos(2.0 * M_PI * k * grid.x(i));
        us[i] = std::sin(2.0 * M_PI * k * grid.x(i));
      }
      basis_u.push_back(uc);
      basis_u.push_back(us);
    }
    const int nb = static_cast<int>(basis_u.size());
    std::vector<DistributionPair> Fb(nb), TFb(nb);
    for (int a = 0; a < nb; ++a) {
      DistributionPair F;
      F.f = basis_u[a] * (r2 / (r2 + 1.0) * ops.chi1().values.transpose());
      F.g = -(basis_u[a] * (ops.chi2().values.transpose() / (r2 + 1.0)));
      TFb[a] = ops.apply_T(F);
      Fb[a] = std::move(F);
    }
    Eigen::MatrixXd M1(nb, nb), M2(nb, nb);
    for (int a = 0; a < nb; ++a)
      for (int c = a; c < nb; ++c) {
        M1(a, c) = M1(c, a) = ops.inner(TFb[a], TFb[c]);
        M2(a, c) = M2(c, a) = ops.inner(Fb[a], Fb[c]);
      }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(M1, M2);
    const double lambda_m = ges.eigenvalues()(0);
    const double target = 4.0 * M_PI * M_PI * ops.d0();
    add("P2_lambda_M", lambda_m, std::abs(lambda_m / target - 1.0) <= 0.05);
    add("P2_target_4pi2_D0", target, true, true);
  }

  // (P4) auxiliary-operator ratios reported across two grid refinements.
  {
    PhaseGrid fine(2 * grid.nx(), 2 * grid.nv(), grid.vmax());
    LinearOps fine_ops(fine, build_profile(spec1, fine),
                       build_profile(spec2, fine), rho_inf);
    SampledBounds bf = sample_bounds(fine_ops, std::max(10, n_samples / 4),
                                     root.split(2), nullptr, {});
    add("P4_AT_ratio_coarse", b.p4_at_max, std::isfinite(b.p4_at_max));
    add("P4_AT_ratio_fine", bf.p4_at_max,
        bf.p4_at_max <= 1.5 * b.p4_at_max + 1e-9);
    add("P4_AL_ratio_coarse", b.p4_al_max, std::isfinite(b.p4_al_max));
    add("P4_AL_ratio_fine", bf.p4_al_max,
        bf.p4_al_max <= 1.5 * b.p4_al_max + 1e-9);
  }

  // Modified-entropy monotonicity: the default delta gates, the scan over
  // delta is informational (only existence of a small enough delta is
  // claimed).
  {
    DistributionPair F0 = DistributionPair::zero(grid);
    for (int i = 0; i < grid.nx(); ++i) {
      const double c = std::cos(2.0 * M_PI * grid.x(i));
      F0.f.row(i) = c * ops.chi1().values.transpose();
      F0.g.row(i) = -c * ops.chi2().values.transpose();
    }
    auto max_uptick = [&](double delta) {
      LinearTrajectory traj = ops.solve_linearized(F0, 0.01, 3.0, delta, 10);
      double worst = 0.0;
      for (std::size_t k = 1; k < traj.h_mod.size(); ++k)
        worst = std::max(worst, traj.h_mod[k] - traj.h_mod[k - 1]);
      return worst;
    };
    const double slack = 1e-12;
    const double up_default = max_uptick(0.1);
    add("H_monotone_uptick_delta_default", up_default, up_default <= slack);
    for (double delta : {0.02, 0.05, 0.1, 0.2, 0.4}) {
      const double up = max_uptick(delta);
      add("scan_H_monotone_delta_" + std::to_string(delta).substr(0, 4), up,
          up <= slack, true);
    }
  }

  return rep;
}

} // namespace kinlab
