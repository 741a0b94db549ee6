#include "seasonal_dispersal/profile.hpp"

#include "seasonal_dispersal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace sdisp {

TimeProfile TimeProfile::constant(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("time profile value must be finite");
  TimeProfile p;
  p.fn_ = [value](double) { return value; };
  p.constant_ = true;
  std::ostringstream s;
  s << "constant(" << value << ")";
  p.description_ = s.str();
  return p;
}

TimeProfile TimeProfile::sine(double mean, double amplitude, const SeasonClock& clock,
                              double cycles) {
  if (!std::isfinite(mean) || !std::isfinite(amplitude) || !std::isfinite(cycles))
    throw InvalidArgument("sine profile parameters must be finite");
  const double start = clock.bad_length();
  const double length = clock.good_length();
  TimeProfile p;
  p.fn_ = [=](double tau) {
    return mean + amplitude * std::sin(2.0 * std::numbers::pi * cycles * (tau - start) /
                                       length);
  };
  p.constant_ = amplitude == 0.0;
  std::ostringstream s;
  s << "sine(mean=" << mean << ", amplitude=" << amplitude << ", cycles=" << cycles << ")";
  p.description_ = s.str();
  return p;
}

TimeProfile TimeProfile::tabulated(std::vector<double> values, const SeasonClock& clock) {
  if (values.size() < 2) throw InvalidArgument("tabulated profile needs >= 2 values");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("tabulated profile values must be finite");
  TimeProfile p;
  p.table_ = values;
  p.table_start_ = clock.bad_length();
  p.table_end_ = clock.omega;
  const double start = p.table_start_;
  const double step = clock.good_length() / static_cast<double>(values.size() - 1);
  p.fn_ = [values = std::move(values), start, step](double tau) {
    const auto last = values.size() - 1;
    const double pos = std::clamp((tau - start) / step, 0.0, static_cast<double>(last));
    const auto i = std::min(static_cast<std::size_t>(pos), last - 1);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
  };
  p.description_ = "table(" + std::to_string(p.table_.size()) + " samples)";
  return p;
}

TimeProfile TimeProfile::callable(std::function<double(double)> fn,
                                  std::string description) {
  if (!fn) throw InvalidArgument("time profile callable is empty");
  TimeProfile p;
  p.fn_ = std::move(fn);
  p.description_ = std::move(description);
  return p;
}

TimeProfile TimeProfile::shifted(double delta) const {
  TimeProfile p = *this;
  p.offset_ -= delta;
  return p;
}

SpatialProfile SpatialProfile::constant_value(double value) {
  if (!std::isfinite(value)) throw InvalidArgument("b value must be finite");
  std::ostringstream s;
  s << "constant(" << value << ")";
  return {[value](double) { return value; }, s.str(), true};
}

SpatialProfile SpatialProfile::linear(double intercept, double slope) {
  std::ostringstream s;
  s << "linear(" << intercept << " + " << slope << " x)";
  return {[=](double x) { return intercept + slope * x; }, s.str(), slope == 0.0};
}

SpatialProfile SpatialProfile::gaussian(double base, double amplitude, double center,
                                        double width) {
  if (!(width > 0.0)) throw InvalidArgument("gaussian width must be positive");
  std::ostringstream s;
  s << "gaussian(base=" << base << ", amplitude=" << amplitude << ", center=" << center
    << ", width=" << width << ")";
  return {[=](double x) {
            const double z = (x - center) / width;
            return base + amplitude * std::exp(-0.5 * z * z);
          },
          s.str(), amplitude == 0.0};
}

SpatialProfile SpatialProfile::cosine(double mean, double amplitude, double wavelength,
                                      double phase) {
  if (!(wavelength > 0.0)) throw InvalidArgument("cosine wavelength must be positive");
  std::ostringstream s;
  s << "cosine(mean=" << mean << ", amplitude=" << amplitude
    << ", wavelength=" << wavelength << ", phase=" << phase << ")";
  return {[=](double x) {
            return mean + amplitude * std::cos(2.0 * std::numbers::pi * (x - phase) /
                                               wavelength);
          },
          s.str(), amplitude == 0.0};
}

SpatialProfile SpatialProfile::table(std::vector<double> xs, std::vector<double> values) {
  if (xs.size() != values.size() || xs.size() < 2)
    throw InvalidArgument("b table needs >= 2 (x, value) rows");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (!(xs[i] < xs[i + 1])) throw InvalidArgument("b table x column must increase");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidArgument("b table values must be finite");
  std::string desc = "table(" + std::to_string(xs.size()) + " rows)";
  return {[xs = std::move(xs), values = std::move(values)](double x) {
            if (x <= xs.front()) return values.front();
            if (x >= xs.back()) return values.back();
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            const auto j = static_cast<std::size_t>(it - xs.begin());
            const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
            return (1.0 - w) * values[j - 1] + w * values[j];
          },
          std::move(desc), false};
}

}  // namespace sdisp
