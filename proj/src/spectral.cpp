#include "seasonal_dispersal/spectral.hpp"

#include "seasonal_dispersal/errors.hpp"
#include "seasonal_dispersal/evolve.hpp"
#include "seasonal_dispersal/parallel.hpp"
#include "seasonal_dispersal/quadrature.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdisp {

namespace {

constexpr int kWarmupIterations = 200;
constexpr int kInnerIterations = 100;
constexpr double kRayleighTol = 1e-13;

struct Estimate {
  double mu = 0.0;
  double residual = 0.0;
  double cw_lower = 0.0;  // min_i (M phi)_i / phi_i
  double cw_upper = 0.0;  // max_i (M phi)_i / phi_i
};

Estimate estimate(const Eigen::MatrixXd& M, const Field& phi) {
  const Field Mphi = M * phi;
  Estimate e;
  e.mu = phi.dot(Mphi) / phi.dot(phi);
  e.residual = (Mphi - e.mu * phi).cwiseAbs().maxCoeff();
  const Eigen::ArrayXd ratio = Mphi.array() / phi.array();
  e.cw_lower = ratio.minCoeff();
  e.cw_upper = ratio.maxCoeff();
  return e;
}

bool converged(const Estimate& e, double mu_prev, double tol) {
  return std::abs(e.mu - mu_prev) <= kRayleighTol * std::max(1.0, std::abs(e.mu)) &&
         e.residual <= tol;
}

void normalize_max(Field& phi) {
  const double top = phi.cwiseAbs().maxCoeff();
  if (!(top > 0.0) || !std::isfinite(top))
    throw NumericalError("principal_eigen: iterate collapsed");
  phi /= top;
}

SpectralResult finish(const DispersalOperator& op, const Field& b, Field phi,
                      const Estimate& e, int iterations) {
  if (!(phi.minCoeff() > 0.0))
    throw NumericalError("principal_eigen: eigenvector lost positivity");
  SpectralResult res;
  res.lambda_p = -e.mu;
  res.phi = std::move(phi);
  res.residual = e.residual;
  res.iterations = iterations;
  res.bound_lower = op.d - (b + op.d * op.row_sums).maxCoeff();
  res.bound_upper = op.d - b.maxCoeff();
  res.b = b;
  res.h2 = check_H2(op, b);
  return res;
}

}  // namespace

SpectralResult principal_eigen(const DispersalOperator& op, const Field& b, double tol,
                               int max_iter) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (b.size() != n) throw InvalidArgument("principal_eigen: b has wrong length");
  if (!b.allFinite()) throw InvalidArgument("principal_eigen: b has non-finite entries");
  if (!(tol > 0.0)) throw InvalidArgument("principal_eigen: tol must be positive");
  if (max_iter < 1) throw InvalidArgument("principal_eigen: max_iter must be positive");

  Eigen::MatrixXd M = op.d * op.W;
  M.diagonal().array() += b.array() - op.d;

  const double shift = op.d + std::max(0.0, -M.diagonal().minCoeff()) + 1.0;
  Eigen::MatrixXd B = M;
  B.diagonal().array() += shift;

  Field phi = Field::Ones(n);
  Estimate e = estimate(M, phi);
  int iterations = 0;

  // Plain power iteration on the nonnegative matrix B.
  const int warmup = std::min(kWarmupIterations, max_iter);
  while (iterations < warmup) {
    phi = B * phi;
    normalize_max(phi);
    ++iterations;
    const double mu_prev = e.mu;
    e = estimate(M, phi);
    if (converged(e, mu_prev, tol)) return finish(op, b, std::move(phi), e, iterations);
  }

  // Shifted inverse iteration with (sigma I - M)^{-1}, an entrywise positive
  // matrix for sigma above the Perron root, which the Collatz-Wielandt upper
  // bound guarantees.
  while (iterations < max_iter) {
    const double width = e.cw_upper - e.cw_lower;
    const double sigma =
        e.cw_upper + std::max(width, 1e-10 * std::max(1.0, std::abs(e.cw_upper)));
    Eigen::MatrixXd A = -M;
    A.diagonal().array() += sigma;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    for (int inner = 0; inner < kInnerIterations && iterations < max_iter; ++inner) {
      phi = lu.solve(phi);
      normalize_max(phi);
      ++iterations;
      const double mu_prev = e.mu;
      e = estimate(M, phi);
      if (converged(e, mu_prev, tol)) return finish(op, b, std::move(phi), e, iterations);
      // Refactor once the bracket has tightened well below the current shift gap.
      if (e.cw_upper - e.cw_lower < 0.01 * (sigma - e.cw_upper)) break;
    }
  }
  std::ostringstream msg;
  msg << "principal_eigen did not converge within " << max_iter
      << " iterations (residual " << e.residual << ")";
  throw NumericalError(msg.str());
}

SpectralResult principal_eigen(const DispersalOperator& op, const Field& b,
                               const SeasonClock& clock, double tol, int max_iter) {
  SpectralResult res = principal_eigen(op, b, tol, max_iter);
  res.lambda_p_omega = lambda_p_omega(clock, res.lambda_p);
  return res;
}

double lambda_p_omega(const SeasonClock& clock, double lambda_p) {
  return clock.delta * clock.rho + (1.0 - clock.rho) * lambda_p;
}

double sigma_integral(const SeasonClock& clock, const TimeProfile& a, double lambda_p,
                      double t) {
  if (t < 0.0 || t > clock.omega * (1.0 + 1e-12))
    throw InvalidArgument("sigma_integral: t must lie in [0, omega]");
  const double bad = clock.bad_length();
  if (t <= bad) return clock.delta * t;
  double a_integral = 0.0;
  if (!a.is_constant()) {
    a_integral = adaptive_simpson([&a](double tau) { return a.at_phase(tau); }, bad, t, 1e-14);
  } else {
    a_integral = a.at_phase(clock.omega) * (t - bad);
  }
  return clock.delta * bad + lambda_p * (t - bad) - a_integral;
}

Field periodic_eigenfunction(const SpectralResult& res, const SeasonClock& clock,
                             const TimeProfile& a, double t) {
  const double lam_omega = lambda_p_omega(clock, res.lambda_p);
  const double exponent = lam_omega * t - sigma_integral(clock, a, res.lambda_p, t);
  return std::exp(exponent) * res.phi;
}

FloquetReport verify_floquet(const SpectralResult& res, const DispersalOperator& op,
                             const SeasonClock& clock, const TimeProfile& a,
                             std::size_t substeps, double lambda_offset, double tolerance) {
  GrowthModel linear;
  linear.family = GrowthFamily::linear;
  linear.clock = clock;
  linear.a = a;
  linear.b = res.b;
  const Field propagated = advance_period(res.phi, op, linear, substeps);

  FloquetReport rep;
  const double lam_omega = lambda_p_omega(clock, res.lambda_p) + lambda_offset;
  rep.expected_multiplier = std::exp(-lam_omega * clock.omega);
  rep.measured_multiplier = propagated.dot(res.phi) / res.phi.dot(res.phi);
  rep.measured_lambda_p_omega = -std::log(rep.measured_multiplier) / clock.omega;
  rep.relative_error = (propagated - rep.expected_multiplier * res.phi).cwiseAbs().maxCoeff() /
                       (rep.expected_multiplier * res.phi.cwiseAbs().maxCoeff());
  rep.passed = rep.relative_error <= tolerance;
  return rep;
}

SweepTable sweep_R(const ProblemSpec& base, const std::vector<double>& R_list, double tol,
                   int max_iter) {
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    if (!(R_list[i] > 0.0)) throw InvalidArgument("sweep_R: radii must be positive");
    if (i > 0 && !(R_list[i] > R_list[i - 1]))
      throw InvalidArgument("sweep_R: radii must be strictly increasing");
  }
  const double h = (base.grid.x_max - base.grid.x_min) / static_cast<double>(base.grid.n);
  const SeasonClock clock =
      SeasonClock::make(base.season.omega, base.season.rho, base.season.delta);
  const TimeProfile a = make_profile(base.growth.a, clock);
  const double a_bar = good_season_mean(a, clock);
  const Kernel kernel = make_kernel(base.kernel);

  SweepTable table;
  table.rows.resize(R_list.size());
  parallel_for(R_list.size(), [&](std::size_t i) {
    SweepRow& row = table.rows[i];
    row.R = R_list[i];
    try {
      // An even cell count at the fixed width h nests every grid inside the
      // next one, so each operator is a principal submatrix of the larger one.
      const auto n = 2 * static_cast<std::size_t>(std::llround(row.R / h));
      row.n = n;
      const double radius = 0.5 * static_cast<double>(n) * h;
      if (n < 64) {
        std::ostringstream msg;
        msg << "R = " << row.R << " resolved by only " << n << " cells (need >= 64)";
        throw InvalidArgument(msg.str());
      }
      const SpatialGrid grid = build_grid(-radius, radius, n, BoundaryMode::truncated);
      const DispersalOperator op = assemble_operator(grid, kernel, base.op.d, false);
      const Field b = sample(grid, base.growth.b).array() + a_bar;
      const SpectralResult res = principal_eigen(op, b, clock, tol, max_iter);
      row.lambda_p = res.lambda_p;
      row.lambda_p_omega = res.lambda_p_omega;
      row.residual = res.residual;
      row.iterations = res.iterations;
      row.bound_lower = res.bound_lower;
      row.bound_upper = res.bound_upper;
      row.h2_satisfied = res.h2.satisfied;
    } catch (const std::exception& ex) {
      row.error = ex.what();
    }
  });

  std::vector<double> ok;
  for (const auto& row : table.rows)
    if (row.error.empty()) ok.push_back(row.lambda_p);
  if (!ok.empty()) {
    double limit = ok.back();
    if (ok.size() >= 2) table.error_bar = std::abs(ok[ok.size() - 1] - ok[ok.size() - 2]);
    if (ok.size() >= 3) {
      const double l1 = ok[ok.size() - 3], l2 = ok[ok.size() - 2], l3 = ok[ok.size() - 1];
      const double denom = (l3 - l2) - (l2 - l1);
      if (std::abs(denom) > 1e-14 * std::max(1.0, std::abs(l3)))
        limit = l3 - (l3 - l2) * (l3 - l2) / denom;
    }
    table.lambda_p_limit = limit;
    table.lambda_p_omega_limit = lambda_p_omega(clock, limit);
  }
  return table;
}

}  // namespace sdisp
