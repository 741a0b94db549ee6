#include "seasonal_dispersal/quadrature.hpp"

#include <cmath>

namespace sdisp {

double composite_simpson(const ScalarFn& f, double a, double b, int panels) {
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / panels;
  double sum = f(a) + f(b);
  for (int i = 1; i < panels; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

double converged_simpson(const ScalarFn& f, double a, double b, double tol,
                         int min_panels, int max_panels) {
  int panels = min_panels;
  double prev = composite_simpson(f, a, b, panels);
  while (panels < max_panels) {
    panels *= 2;
    const double next = composite_simpson(f, a, b, panels);
    if (std::abs(next - prev) <= tol) return next;
    prev = next;
  }
  return prev;
}

namespace {

double simpson_step(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const ScalarFn& f, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_step(fa, flm, fm, a, m);
  const double right = simpson_step(fm, frm, fb, m, b);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol)
    return left + right + diff / 15.0;
  return adaptive_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const ScalarFn& f, double a, double b, double tol,
                        int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  // Split once so symmetric integrands cannot fool the first error estimate.
  const double m = 0.5 * (a + b);
  const double fl = f(0.5 * (a + m));
  const double fr = f(0.5 * (m + b));
  return adaptive_rec(f, a, m, fa, fl, fm, simpson_step(fa, fl, fm, a, m), 0.5 * tol,
                      max_depth) +
         adaptive_rec(f, m, b, fm, fr, fb, simpson_step(fm, fr, fb, m, b), 0.5 * tol,
                      max_depth);
}

}  // namespace sdisp
