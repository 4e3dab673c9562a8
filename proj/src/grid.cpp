#include "kinlab/grid.hpp"

#include <stdexcept>
#include <string>

namespace kinlab {

PhaseGrid::PhaseGrid(int nx, int nv, double vmax, int dim)
    : dim_(dim), nx_(nx), nv_(nv), vmax_(vmax) {
  if (dim != 1)
    throw std::invalid_argument("PhaseGrid: only dim = 1 is supported");
  if (nx < 4)
    throw std::invalid_argument("PhaseGrid: nx must be >= 4, got " +
                                std::to_string(nx));
  if (nx % 2 != 0)
    throw std::invalid_argument(
        "PhaseGrid: nx must be even (spectral transform requirement), got " +
        std::to_string(nx));
  if (nv < 4)
    throw std::invalid_argument("PhaseGrid: nv must be >= 4, got " +
                                std::to_string(nv));
  if (!(vmax > 0.0))
    throw std::invalid_argument("PhaseGrid: vmax must be positive");
  dx_ = 1.0 / nx;
  dv_ = 2.0 * vmax / nv;
}

} // namespace kinlab
