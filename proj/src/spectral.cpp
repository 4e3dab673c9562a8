#include "kinlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace kinlab {

namespace {

// (1 - exp(-i theta)) / (i theta), the path-average multiplier of a mode
// advected through phase theta. Series below 1e-3 avoids cancellation.
std::complex<double> average_multiplier(double theta) {
  if (std::abs(theta) < 1e-3) {
    const double t2 = theta * theta;
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            -theta / 2.0 + theta * t2 / 24.0};
  }
  const std::complex<double> num =
      1.0 - std::complex<double>(std::cos(theta), -std::sin(theta));
  return num / std::complex<double>(0.0, theta);
}

} // namespace

SpectralX::SpectralX(int nx) : nx_(nx) {
  if (nx < 4 || nx % 2 != 0)
    throw std::invalid_argument("SpectralX: nx must be even and >= 4");
  real_buf_ = fftw_alloc_real(nx);
  spec_buf_ = reinterpret_cast<std::complex<double>*>(
      fftw_alloc_complex(nx / 2 + 1));
  plan_fwd_ = fftw_plan_dft_r2c_1d(
      nx, real_buf_, reinterpret_cast<fftw_complex*>(spec_buf_),
      FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_1d(
      nx, reinterpret_cast<fftw_complex*>(spec_buf_), real_buf_,
      FFTW_ESTIMATE);
}

SpectralX::~SpectralX() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(real_buf_);
  fftw_free(spec_buf_);
}

void SpectralX::forward(const double* in) {
  std::memcpy(real_buf_, in, sizeof(double) * nx_);
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
}

void SpectralX::inverse(double* out) {
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  const double scale = 1.0 / nx_;
  for (int i = 0; i < nx_; ++i)
    out[i] = real_buf_[i] * scale;
}

void SpectralX::shift(Eigen::Ref<Eigen::VectorXd> col, double s) {
  forward(col.data());
  for (int k = 1; k < nx_ / 2; ++k) {
    const double theta = 2.0 * M_PI * k * s;
    spec_buf_[k] *= std::complex<double>(std::cos(theta), -std::sin(theta));
  }
  // Nyquist bin held fixed (multiplier 1).
  inverse(col.data());
}

void SpectralX::shift_with_average(Eigen::Ref<Eigen::VectorXd> col, double s,
                                   Eigen::Ref<Eigen::VectorXd> average) {
  forward(col.data());
  std::vector<std::complex<double>> shifted(nx_ / 2 + 1);
  shifted[0] = spec_buf_[0];
  shifted[nx_ / 2] = spec_buf_[nx_ / 2];
  for (int k = 1; k < nx_ / 2; ++k) {
    const double theta = 2.0 * M_PI * k * s;
    const std::complex<double> phase(std::cos(theta), -std::sin(theta));
    shifted[k] = spec_buf_[k] * phase;
    spec_buf_[k] *= average_multiplier(theta);
  }
  inverse(average.data());
  std::memcpy(spec_buf_, shifted.data(),
              sizeof(std::complex<double>) * (nx_ / 2 + 1));
  inverse(col.data());
}

void SpectralX::derivative(const Eigen::Ref<const Eigen::VectorXd>& in,
                           Eigen::Ref<Eigen::VectorXd> out) {
  forward(in.data());
  spec_buf_[0] = 0.0;
  for (int k = 1; k < nx_ / 2; ++k)
    spec_buf_[k] *= std::complex<double>(0.0, 2.0 * M_PI * k);
  spec_buf_[nx_ / 2] = 0.0;
  inverse(out.data());
}

void SpectralX::elliptic_inverse(Eigen::Ref<Eigen::VectorXd> col, double d0) {
  forward(col.data());
  for (int k = 1; k < nx_ / 2; ++k) {
    const double xi = 2.0 * M_PI * k;
    spec_buf_[k] /= 1.0 + d0 * xi * xi;
  }
  // k = 0 and the Nyquist bin have zero derivative symbol: divide by 1.
  inverse(col.data());
}

} // namespace kinlab
