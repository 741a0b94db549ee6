#pragma once

#include "seasonal_dispersal/grid.hpp"
#include "seasonal_dispersal/kernel.hpp"

#include <Eigen/Core>

namespace sdisp {

/// Dense discretization of u -> d (int_Omega J(x - y) u(y) dy - u(x)) by the
/// midpoint rule: W(i, j) = J(dist(x_i, x_j)) * h.
struct DispersalOperator {
  SpatialGrid grid;
  Kernel kernel = Kernel::tent(1.0);
  double d = 1.0;
  Eigen::MatrixXd W;
  /// Row sums of W, i.e. quadrature of int_Omega J(x_i - y) dy.
  Eigen::VectorXd row_sums;
  bool rows_normalized = false;

  std::size_t size() const { return grid.n; }
};

/// Throws HypothesisViolation when the kernel is not resolved by the grid
/// (gamma < h, or the discrete graph is disconnected) and when 2 gamma exceeds
/// the domain length in wrap mode.
DispersalOperator assemble_operator(const SpatialGrid& grid, const Kernel& k,
                                    double d, bool exact_row_normalization);

/// d * (W u - u)
Field apply_L(const DispersalOperator& op, const Field& u);

struct H2Report {
  double lhs = 0.0;  ///< min over columns of the column sums of W
  double rhs = 0.0;  ///< (max b - min b) / d
  bool satisfied = false;
};

/// Sufficient condition for existence of a principal eigenfunction:
/// inf_y int_Omega J(x - y) dx > (b_max - b_min) / d. Advisory only.
H2Report check_H2(const DispersalOperator& op, const Field& b);

}  // namespace sdisp
