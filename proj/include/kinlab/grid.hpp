#pragma once

#include <cstddef>

namespace kinlab {

/// Tensor grid for the phase space: unit torus in x, truncated symmetric
/// interval [-vmax, vmax] in v.
///
/// x-nodes: x_i = i/nx (periodic, uniform weight dx = 1/nx).
/// v-nodes: cell midpoints v_j = -vmax + (j+1/2)*dv with dv = 2*vmax/nv,
/// uniform weight dv. Midpoints make v -> -v an exact node map
/// (j <-> nv-1-j), which even-symmetrization of profiles relies on.
class PhaseGrid {
public:
  PhaseGrid(int nx, int nv, double vmax, int dim = 1);

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int nv() const { return nv_; }
  double vmax() const { return vmax_; }

  double dx() const { return dx_; }
  double dv() const { return dv_; }

  double x(int i) const { return i * dx_; }
  double v(int j) const { return -vmax_ + (j + 0.5) * dv_; }
  /// Quadrature weight for the v-integral at node j (uniform).
  double wv(int j) const { (void)j; return dv_; }

  /// Index of the mirror node (-v_j is a node for every j).
  int mirror(int j) const { return nv_ - 1 - j; }

  bool operator==(const PhaseGrid& other) const {
    return nx_ == other.nx_ && nv_ == other.nv_ && vmax_ == other.vmax_ &&
           dim_ == other.dim_;
  }
  bool operator!=(const PhaseGrid& other) const { return !(*this == other); }

private:
  int dim_;
  int nx_;
  int nv_;
  double vmax_;
  double dx_;
  double dv_;
};

} // namespace kinlab
