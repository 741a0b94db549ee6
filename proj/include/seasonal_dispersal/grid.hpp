#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <string_view>

namespace sdisp {

/// Grid function: one value per cell midpoint.
using Field = Eigen::VectorXd;

enum class BoundaryMode {
  truncated,      ///< integral restricted to the domain
  periodic_wrap,  ///< distances wrapped on a circle of length x_max - x_min
};

std::string_view to_string(BoundaryMode mode);
BoundaryMode boundary_mode_from_string(std::string_view name);

/// Uniform 1-D mesh of n cells over [x_min, x_max]; nodes are cell midpoints.
struct SpatialGrid {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n = 0;
  double h = 0.0;
  Eigen::VectorXd nodes;
  BoundaryMode boundary_mode = BoundaryMode::truncated;

  double length() const { return x_max - x_min; }
  std::size_t size() const { return n; }

  /// Distance between nodes i and j, wrapped in periodic mode.
  double distance(std::size_t i, std::size_t j) const;
};

/// Throws InvalidArgument for non-finite bounds, x_min >= x_max or n < 3.
SpatialGrid build_grid(double x_min, double x_max, std::size_t n,
                       BoundaryMode mode);

/// Samples a function of x at the grid nodes.
template <typename Fn>
Field sample(const SpatialGrid& grid, Fn&& fn) {
  Field out(static_cast<Eigen::Index>(grid.n));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = fn(grid.nodes[i]);
  return out;
}

}  // namespace sdisp
