#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "kinlab/profile.hpp"
#include "kinlab/spectral.hpp"
#include "kinlab/state.hpp"

namespace kinlab {

struct ModifiedEntropyValue {
  double value = 0.0;
  double lower = 0.0;   ///< (1-delta)/2 ||F||^2
  double upper = 0.0;   ///< (1+delta)/2 ||F||^2
  bool bracket_ok = false;
};

struct LinearTrajectory {
  std::vector<double> times;
  std::vector<double> norm;   ///< weighted L2 norm ||F||
  std::vector<double> h_mod;  ///< modified entropy H[F]
  std::vector<double> h1_mod; ///< mixed-derivative H1 functional
};

/// The linearized machinery around the equilibrium with parameter rho_inf:
/// weighted scalar product, collision operator L and its loss/gain split,
/// transport T, projection Pi onto the local equilibria, the auxiliary
/// operator A of the modified entropy, and the linearized time integrator.
///
/// Not thread-safe (holds spectral scratch); use one instance per thread.
class LinearOps {
public:
  LinearOps(const PhaseGrid& grid, VelocityProfile chi1, VelocityProfile chi2,
            double rho_inf);

  const PhaseGrid& grid() const { return grid_; }
  double rho_inf() const { return rho_inf_; }
  const VelocityProfile& chi1() const { return chi1_; }
  const VelocityProfile& chi2() const { return chi2_; }

  /// D0 = (rho^2 D1 + D2) / (rho^2 + 1), the macroscopic diffusion matrix
  /// of the linearized dynamics (scalar in 1-D).
  double d0() const { return d0_; }

  double inner(const DistributionPair& F, const DistributionPair& G) const;
  double norm(const DistributionPair& F) const;

  DistributionPair apply_L(const DistributionPair& F) const;
  DistributionPair apply_Lambda(const DistributionPair& F) const;
  DistributionPair apply_K(const DistributionPair& F) const;
  DistributionPair apply_Pi(const DistributionPair& F) const;
  DistributionPair apply_T(const DistributionPair& F);

  /// (1 - d/dx (d0 d/dx))^{-1} applied to an x-field, exactly in Fourier
  /// space.
  Eigen::VectorXd elliptic_solve(const Eigen::VectorXd& u, double d0);

  /// A = (1 + (T Pi)* T Pi)^{-1} (T Pi)*. The adjoint reduces to the
  /// divergence of the flux-difference moment embedded into the Pi-range
  /// profile, and the inverse to the scalar elliptic solve with d0().
  DistributionPair apply_A(const DistributionPair& F);

  /// H[F] = ||F||^2/2 + delta <A F, F>, with its equivalence bracket.
  ModifiedEntropyValue modified_entropy(const DistributionPair& F,
                                        double delta);

  /// ||F||^2 + ||dx F||^2 + ||dv F||^2 + delta <dx F, dv F>.
  /// Spectral x-derivatives; centered v-differences with one-sided
  /// second-order stencils at the two velocity boundary nodes.
  double h1_functional(const DistributionPair& F, double delta);

  DistributionPair dx(const DistributionPair& F);
  DistributionPair dv(const DistributionPair& F) const;

  /// Strang splitting for the linearized equation: exact spectral transport
  /// and the exact flow of the x-local constant-coefficient reaction system.
  /// Warns on stderr if the initial mass difference is not zero (decay then
  /// targets a shifted equilibrium).
  LinearTrajectory solve_linearized(const DistributionPair& F0, double dt,
                                    double t_final, double delta = 0.1,
                                    int record_every = 1);

private:
  PhaseGrid grid_;
  VelocityProfile chi1_;
  VelocityProfile chi2_;
  double rho_inf_;
  double d0_;
  SpectralX tx_;
};

enum class OperatorLabel { T, L, Pi, Lambda, K, A, TPi };
std::string to_string(OperatorLabel label);

/// Matrix over the stacked state vector: f-block then g-block, x-major then
/// v within each block.
struct DenseOperator {
  Eigen::MatrixXd mat;
  OperatorLabel label;
};

Eigen::VectorXd pack(const DistributionPair& F, const PhaseGrid& grid);
DistributionPair unpack(const Eigen::VectorXd& x, const PhaseGrid& grid);

/// Diagonal of the weighted scalar product in the packed ordering.
Eigen::VectorXd weight_diagonal(const PhaseGrid& grid,
                                const VelocityProfile& chi1,
                                const VelocityProfile& chi2, double rho_inf);

/// Assembles the operator by application to the unit basis vectors.
/// Guarded to 2*nx*nv <= 8192.
DenseOperator assemble_dense(LinearOps& ops, OperatorLabel which);

struct CoercivityEntry {
  std::string name;
  double value = 0.0;
  bool pass = false;
  bool informational = false; ///< scan entries excluded from all_pass()
  Eigen::VectorXd witness;    ///< packed failing sample, if any
};

struct CoercivityReport {
  std::vector<CoercivityEntry> entries;
  bool all_pass() const;
  /// One "name = value | pass|fail" line per entry.
  std::string to_text() const;
};

/// Measures the tagged estimates over band-limited random samples and dense
/// spectra: microscopic/macroscopic coercivity, parabolic macroscopic
/// dynamics, auxiliary-operator bounds (on this grid and a refined one),
/// loss coercivity on values and v-derivatives, the gain interpolation
/// constants, and a modified-entropy monotonicity scan over delta.
CoercivityReport coercivity_report(const PhaseGrid& grid,
                                   const ProfileSpec& spec1,
                                   const ProfileSpec& spec2, double rho_inf,
                                   int n_samples, std::uint64_t seed);

} // namespace kinlab
