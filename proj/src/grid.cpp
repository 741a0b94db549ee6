#include "seasonal_dispersal/grid.hpp"

#include "seasonal_dispersal/errors.hpp"

#include <cmath>

namespace sdisp {

std::string_view to_string(BoundaryMode mode) {
  switch (mode) {
    case BoundaryMode::truncated:
      return "truncated";
    case BoundaryMode::periodic_wrap:
      return "periodic_wrap";
  }
  return "unknown";
}

BoundaryMode boundary_mode_from_string(std::string_view name) {
  if (name == "truncated") return BoundaryMode::truncated;
  if (name == "periodic_wrap" || name == "periodic") return BoundaryMode::periodic_wrap;
  throw InvalidArgument("unknown boundary mode '" + std::string(name) +
                        "' (expected truncated|periodic_wrap)");
}

double SpatialGrid::distance(std::size_t i, std::size_t j) const {
  // Node offsets are integer multiples of h, so compute from indices to keep
  // the matrix exactly symmetric.
  const auto k = static_cast<double>(i > j ? i - j : j - i);
  if (boundary_mode == BoundaryMode::periodic_wrap) {
    const double wrapped = static_cast<double>(n) - k;
    return (k < wrapped ? k : wrapped) * h;
  }
  return k * h;
}

SpatialGrid build_grid(double x_min, double x_max, std::size_t n,
                       BoundaryMode mode) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max))
    throw InvalidArgument("grid bounds must be finite");
  if (!(x_min < x_max))
    throw InvalidArgument("grid requires x_min < x_max");
  if (n < 3) throw InvalidArgument("grid requires n >= 3 cells");

  SpatialGrid grid;
  grid.x_min = x_min;
  grid.x_max = x_max;
  grid.n = n;
  grid.h = (x_max - x_min) / static_cast<double>(n);
  grid.boundary_mode = mode;
  grid.nodes.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    grid.nodes[static_cast<Eigen::Index>(i)] =
        x_min + (static_cast<double>(i) + 0.5) * grid.h;
  return grid;
}

}  // namespace sdisp
