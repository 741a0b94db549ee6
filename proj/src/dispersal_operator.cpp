#include "seasonal_dispersal/dispersal_operator.hpp"

#include "seasonal_dispersal/errors.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace sdisp {

namespace {

// Breadth-first search over the positive entries of W.
bool is_irreducible(const Eigen::MatrixXd& W) {
  const Eigen::Index n = W.rows();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> stack{0};
  seen[0] = 1;
  Eigen::Index count = 1;
  while (!stack.empty()) {
    const Eigen::Index i = stack.back();
    stack.pop_back();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!seen[static_cast<std::size_t>(j)] && W(i, j) > 0.0) {
        seen[static_cast<std::size_t>(j)] = 1;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

}  // namespace

DispersalOperator assemble_operator(const SpatialGrid& grid, const Kernel& k,
                                    double d, bool exact_row_normalization) {
  if (!std::isfinite(d) || d <= 0.0)
    throw InvalidArgument("operator.d must be a positive finite number");
  if (grid.n < 3) throw InvalidArgument("grid requires n >= 3 cells");
  if (k.gamma() < grid.h) {
    std::ostringstream msg;
    msg << "kernel unresolved by grid (gamma = " << k.gamma()
        << " < h = " << grid.h
        << ") - operator reduces to diagonal, principal eigenvector positivity lost";
    throw HypothesisViolation(msg.str());
  }
  if (grid.boundary_mode == BoundaryMode::periodic_wrap &&
      2.0 * k.gamma() > grid.length()) {
    std::ostringstream msg;
    msg << "wrap aliasing: periodic_wrap needs 2*gamma = " << 2.0 * k.gamma()
        << " <= domain length " << grid.length();
    throw HypothesisViolation(msg.str());
  }

  DispersalOperator op;
  op.grid = grid;
  op.kernel = k;
  op.d = d;
  const auto n = static_cast<Eigen::Index>(grid.n);
  op.W.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double w = k(grid.distance(static_cast<std::size_t>(i),
                                       static_cast<std::size_t>(j))) * grid.h;
      op.W(i, j) = w;
      op.W(j, i) = w;
    }
  }

  if (!is_irreducible(op.W)) {
    std::ostringstream msg;
    msg << "kernel unresolved by grid (no coupling between neighbouring nodes at h = "
        << grid.h << ", gamma = " << k.gamma()
        << ") - operator reduces to diagonal, principal eigenvector positivity lost";
    throw HypothesisViolation(msg.str());
  }

  op.row_sums = op.W.rowwise().sum();
  if (exact_row_normalization && grid.boundary_mode == BoundaryMode::periodic_wrap) {
    for (Eigen::Index i = 0; i < n; ++i) op.W.row(i) /= op.row_sums[i];
    op.row_sums = op.W.rowwise().sum();
    op.rows_normalized = true;
  }
  return op;
}

Field apply_L(const DispersalOperator& op, const Field& u) {
  if (u.size() != op.W.cols())
    throw InvalidArgument("apply_L: field size does not match operator grid");
  return op.d * (op.W * u - u);
}

H2Report check_H2(const DispersalOperator& op, const Field& b) {
  if (b.size() != op.W.cols())
    throw InvalidArgument("check_H2: field size does not match operator grid");
  H2Report report;
  report.lhs = op.W.colwise().sum().minCoeff();
  report.rhs = (b.maxCoeff() - b.minCoeff()) / op.d;
  report.satisfied = report.lhs > report.rhs;
  return report;
}

}  // namespace sdisp
