#pragma once

#include "seasonal_dispersal/season.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace sdisp {

/// Good-season time profile a(t). Evaluated by phase tau in [rho omega, omega]
/// (see SeasonClock::phase), which makes it omega-periodic by construction.
class TimeProfile {
 public:
  static TimeProfile constant(double value);
  /// mean + amplitude * sin(2 pi cycles (tau - rho omega) / ((1 - rho) omega))
  static TimeProfile sine(double mean, double amplitude, const SeasonClock& clock,
                          double cycles = 1.0);
  /// Uniform samples over [rho omega, omega], linearly interpolated.
  static TimeProfile tabulated(std::vector<double> values, const SeasonClock& clock);
  static TimeProfile callable(std::function<double(double)> fn,
                              std::string description = "callable");

  double at_phase(double tau) const { return fn_(tau) + offset_; }
  double at_time(const SeasonClock& clock, double t) const {
    return at_phase(clock.phase(t));
  }

  /// Profile minus a constant.
  TimeProfile shifted(double delta) const;

  bool is_constant() const { return constant_; }
  bool is_tabulated() const { return !table_.empty(); }
  const std::vector<double>& table() const { return table_; }
  /// Start/end phase of the tabulation interval (tabulated profiles only).
  double table_start() const { return table_start_; }
  double table_end() const { return table_end_; }
  double offset() const { return offset_; }
  const std::string& description() const { return description_; }

 private:
  std::function<double(double)> fn_;
  double offset_ = 0.0;
  bool constant_ = false;
  std::vector<double> table_;
  double table_start_ = 0.0;
  double table_end_ = 0.0;
  std::string description_;
};

/// Spatial coefficient b(x) as a function of position.
struct SpatialProfile {
  std::function<double(double)> fn;
  std::string description;
  bool constant = false;

  double operator()(double x) const { return fn(x); }

  static SpatialProfile constant_value(double value);
  static SpatialProfile linear(double intercept, double slope);
  /// base + amplitude * exp(-(x - center)^2 / (2 width^2))
  static SpatialProfile gaussian(double base, double amplitude, double center,
                                 double width);
  /// mean + amplitude * cos(2 pi (x - phase) / wavelength)
  static SpatialProfile cosine(double mean, double amplitude, double wavelength,
                               double phase);
  /// Piecewise-linear through (xs, values); constant extrapolation.
  static SpatialProfile table(std::vector<double> xs, std::vector<double> values);
};

}  // namespace sdisp
