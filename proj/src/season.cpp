#include "seasonal_dispersal/season.hpp"

#include "seasonal_dispersal/errors.hpp"

#include <cmath>

namespace sdisp {

std::string_view to_string(Season s) { return s == Season::bad ? "bad" : "good"; }

SeasonClock SeasonClock::make(double omega, double rho, double delta) {
  if (!std::isfinite(omega) || omega <= 0.0)
    throw InvalidArgument("season.omega must be positive");
  if (!std::isfinite(rho) || rho <= 0.0 || rho >= 1.0)
    throw InvalidArgument("season.rho must lie in (0,1)");
  if (!std::isfinite(delta) || delta <= 0.0)
    throw InvalidArgument("season.delta must be positive");
  return SeasonClock{omega, rho, delta};
}

double SeasonClock::phase(double t) const {
  double p = t - omega * std::floor(t / omega);
  if (p <= 0.0) p = omega;
  return p;
}

Season SeasonClock::season_of(double t) const {
  return phase(t) <= bad_length() ? Season::bad : Season::good;
}

}  // namespace sdisp
