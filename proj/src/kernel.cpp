#include "seasonal_dispersal/kernel.hpp"

#include "seasonal_dispersal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sdisp {

namespace {

void require_gamma(double gamma) {
  if (!std::isfinite(gamma) || gamma <= 0.0)
    throw InvalidArgument("kernel.gamma must be a positive finite number");
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::tent:
      return "tent";
    case KernelFamily::epanechnikov:
      return "epanechnikov";
    case KernelFamily::truncated_gaussian:
      return "truncated_gaussian";
    case KernelFamily::tabulated:
      return "tabulated";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "tent") return KernelFamily::tent;
  if (name == "epanechnikov") return KernelFamily::epanechnikov;
  if (name == "truncated_gaussian") return KernelFamily::truncated_gaussian;
  if (name == "tabulated") return KernelFamily::tabulated;
  throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
}

Kernel Kernel::tent(double gamma) {
  require_gamma(gamma);
  Kernel k;
  k.family_ = KernelFamily::tent;
  k.gamma_ = gamma;
  return k;
}

Kernel Kernel::epanechnikov(double gamma) {
  require_gamma(gamma);
  Kernel k;
  k.family_ = KernelFamily::epanechnikov;
  k.gamma_ = gamma;
  return k;
}

Kernel Kernel::truncated_gaussian(double gamma, double sigma) {
  require_gamma(gamma);
  if (!std::isfinite(sigma) || sigma <= 0.0)
    throw InvalidArgument("kernel.sigma must be a positive finite number");
  Kernel k;
  k.family_ = KernelFamily::truncated_gaussian;
  k.gamma_ = gamma;
  k.sigma_ = sigma;
  const double mass = sigma * std::sqrt(2.0 * std::numbers::pi) *
                      std::erf(gamma / (sigma * std::numbers::sqrt2));
  k.scale_ = 1.0 / mass;
  return k;
}

Kernel Kernel::tabulated(double gamma, std::vector<double> samples) {
  require_gamma(gamma);
  if (samples.size() < 3 || samples.size() % 2 == 0)
    throw InvalidArgument(
        "tabulated kernel needs an odd number (>= 3) of samples centred on 0");
  for (double s : samples)
    if (!std::isfinite(s) || s < 0.0)
      throw InvalidArgument("tabulated kernel samples must be finite and >= 0");
  if (samples[samples.size() / 2] <= 0.0)
    throw InvalidArgument("tabulated kernel must be positive at 0");

  // Trapezoid mass is exact for the piecewise-linear interpolant.
  const double dz = 2.0 * gamma / static_cast<double>(samples.size() - 1);
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i)
    mass += 0.5 * (samples[i] + samples[i + 1]) * dz;

  Kernel k;
  k.family_ = KernelFamily::tabulated;
  k.gamma_ = gamma;
  k.scale_ = 1.0 / mass;
  k.samples_ = std::move(samples);
  return k;
}

double Kernel::operator()(double z) const {
  const double r = std::abs(z);
  if (!(r <= gamma_)) return 0.0;
  switch (family_) {
    case KernelFamily::tent:
      return (1.0 - r / gamma_) / gamma_;
    case KernelFamily::epanechnikov: {
      const double q = r / gamma_;
      return 0.75 * (1.0 - q * q) / gamma_;
    }
    case KernelFamily::truncated_gaussian:
      return scale_ * std::exp(-0.5 * (r / sigma_) * (r / sigma_));
    case KernelFamily::tabulated: {
      const auto m = samples_.size() - 1;
      const double pos = (z + gamma_) / (2.0 * gamma_) * static_cast<double>(m);
      const auto i = std::min(static_cast<std::size_t>(pos), m - 1);
      const double w = pos - static_cast<double>(i);
      return scale_ * ((1.0 - w) * samples_[i] + w * samples_[i + 1]);
    }
  }
  return 0.0;
}

}  // namespace sdisp
