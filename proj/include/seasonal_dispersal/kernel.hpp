#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sdisp {

enum class KernelFamily { tent, epanechnikov, truncated_gaussian, tabulated };

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

/// Even dispersal kernel supported in [-gamma, gamma] with unit mass on the
/// line. Construct through the factory functions, which validate parameters.
class Kernel {
 public:
  /// (1/gamma)(1 - |z|/gamma)
  static Kernel tent(double gamma);
  /// 3/(4 gamma) (1 - (z/gamma)^2)
  static Kernel epanechnikov(double gamma);
  /// Gaussian with standard deviation sigma cut at |z| = gamma and rescaled
  /// to unit mass.
  static Kernel truncated_gaussian(double gamma, double sigma);
  /// Uniform samples over [-gamma, gamma], linearly interpolated and
  /// renormalized to unit mass. Samples must be nonnegative with J(0) > 0.
  static Kernel tabulated(double gamma, std::vector<double> samples);

  KernelFamily family() const { return family_; }
  double gamma() const { return gamma_; }
  double sigma() const { return sigma_; }
  const std::vector<double>& samples() const { return samples_; }

  double operator()(double z) const;

 private:
  Kernel() = default;

  KernelFamily family_ = KernelFamily::tent;
  double gamma_ = 1.0;
  double sigma_ = 0.0;
  double scale_ = 1.0;
  std::vector<double> samples_;
};

inline double eval_kernel(const Kernel& k, double z) { return k(z); }

}  // namespace sdisp
