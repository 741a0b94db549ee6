#pragma once

#include <string_view>

namespace sdisp {

enum class Season { bad, good };

std::string_view to_string(Season s);

/// Seasonal clock: period omega, bad-season fraction rho, bad-season decay
/// rate delta. Period i is (i omega, (i+1) omega]; its bad part is
/// (i omega, (i+rho) omega] and its good part ((i+rho) omega, (i+1) omega].
struct SeasonClock {
  double omega = 1.0;
  double rho = 0.5;
  double delta = 1.0;

  /// Throws InvalidArgument unless omega > 0, 0 < rho < 1, delta > 0.
  static SeasonClock make(double omega, double rho, double delta);

  double bad_length() const { return rho * omega; }
  double good_length() const { return (1.0 - rho) * omega; }

  /// Position of t inside its period, in (0, omega]; t = i omega maps to
  /// omega (closure of the preceding good season). t = 0 also maps to omega.
  double phase(double t) const;

  Season season_of(double t) const;
};

}  // namespace sdisp
