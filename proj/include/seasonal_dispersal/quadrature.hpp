#pragma once

#include <functional>

namespace sdisp {

using ScalarFn = std::function<double(double)>;

double composite_simpson(const ScalarFn& f, double a, double b, int panels);

/// Composite Simpson starting at min_panels and doubling until two successive
/// values agree within tol (or max_panels is reached).
double converged_simpson(const ScalarFn& f, double a, double b, double tol,
                         int min_panels = 64, int max_panels = 1 << 20);

/// Recursive adaptive Simpson with Richardson correction.
double adaptive_simpson(const ScalarFn& f, double a, double b, double tol = 1e-13,
                        int max_depth = 40);

}  // namespace sdisp
