#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace kinlab {

/// Fourier operations along the periodic x-direction (unit torus, nx even).
///
/// Frequency convention: modes k = 0..nx/2-1 carry the symbol 2*pi*k; the
/// Nyquist bin k = nx/2 is treated as non-oscillatory (derivative symbol 0,
/// shift multiplier 1). This keeps every operation real-to-real, makes the
/// shift a unimodular multiplier (exact L2 preservation), and makes the
/// exact transport flow the exponential of the discrete derivative.
///
/// Not thread-safe: instances hold FFTW plans and scratch buffers. Use one
/// instance per thread.
class SpectralX {
public:
  explicit SpectralX(int nx);
  ~SpectralX();
  SpectralX(const SpectralX&) = delete;
  SpectralX& operator=(const SpectralX&) = delete;

  int nx() const { return nx_; }

  /// In-place band-limited shift: field(x) <- field(x - s).
  void shift(Eigen::Ref<Eigen::VectorXd> col, double s);

  /// Shift as above and also return the path average
  /// (1/s) * integral over the shift of the moving field, which satisfies
  /// shifted - original = -s * d/dx(average) exactly in this discretization.
  void shift_with_average(Eigen::Ref<Eigen::VectorXd> col, double s,
                          Eigen::Ref<Eigen::VectorXd> average);

  /// Spectral first derivative.
  void derivative(const Eigen::Ref<const Eigen::VectorXd>& in,
                  Eigen::Ref<Eigen::VectorXd> out);

  /// Solves (1 - d0 * d^2/dx^2) u = rhs in place (d0 >= 0).
  void elliptic_inverse(Eigen::Ref<Eigen::VectorXd> col, double d0);

private:
  void forward(const double* in);
  void inverse(double* out);

  int nx_;
  double* real_buf_;
  std::complex<double>* spec_buf_;
  void* plan_fwd_;
  void* plan_inv_;
};

} // namespace kinlab
