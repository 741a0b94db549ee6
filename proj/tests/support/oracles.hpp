#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerics.

#include "seasonal_dispersal/problem.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <random>

namespace oracle {

// Composite 5-point Gauss-Legendre rule; exact for polynomials of degree 9
// on every panel.
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                             int panels) {
  static constexpr std::array<double, 5> x = {0.0, -0.5384693101056831, 0.5384693101056831,
                                              -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> w = {0.5688888888888889, 0.4786286704993665,
                                              0.4786286704993665, 0.2369268850561891,
                                              0.2369268850561891};
  const double step = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * step;
    for (std::size_t k = 0; k < 5; ++k) sum += w[k] * f(mid + 0.5 * step * x[k]);
  }
  return 0.5 * step * sum;
}

// Solution of u' = b u - c u^2 from u0 after time t.
inline double scalar_logistic(double u0, double b, double c, double t) {
  const double e = std::exp(b * t);
  return b * u0 * e / (b + c * u0 * (e - 1.0));
}

// Period map of the scalar decay-then-logistic system; fixed point is the
// constant periodic orbit.
inline double scalar_period_map(double u, double b, double c, double delta, double rho,
                                double omega) {
  const double after_bad = std::exp(-delta * rho * omega) * u;
  return scalar_logistic(after_bad, b, c, (1.0 - rho) * omega);
}

// Fixed point of scalar_period_map by plain iteration (the map contracts
// toward its positive fixed point when m e^{bT} > 1).
inline double scalar_fixed_point(double b, double c, double delta, double rho, double omega) {
  double u = 1.0;
  for (int i = 0; i < 100000; ++i) {
    const double next = scalar_period_map(u, b, c, delta, rho, omega);
    if (std::abs(next - u) <= 1e-16 * std::abs(u)) return next;
    u = next;
  }
  return u;
}

inline sdisp::ProblemSpec wrap_spec(double b = 1.0, std::size_t n = 101) {
  sdisp::ProblemSpec s;
  s.grid = {-10.0, 10.0, n, sdisp::BoundaryMode::periodic_wrap};
  s.kernel.gamma = 1.0;
  s.season = sdisp::SeasonClock::make(2.0, 0.5, 0.5);
  s.growth.b = sdisp::SpatialProfile::constant_value(b);
  return s;
}

inline sdisp::ProblemSpec heterogeneous_spec(std::size_t n = 101) {
  sdisp::ProblemSpec s;
  s.grid = {-10.0, 10.0, n, sdisp::BoundaryMode::truncated};
  s.kernel.gamma = 1.0;
  s.season = sdisp::SeasonClock::make(2.0, 0.4, 0.5);
  s.growth.b = sdisp::SpatialProfile::gaussian(0.2, 1.0, 0.0, 2.0);
  return s;
}

}  // namespace oracle
