#include "seasonal_dispersal/classify.hpp"
#include "seasonal_dispersal/errors.hpp"
#include "seasonal_dispersal/evolve.hpp"
#include "seasonal_dispersal/problem.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sdisp;

namespace {

ProblemSpec wrap_with_delta(double delta, double rho = 0.5) {
  auto spec = oracle::wrap_spec(1.0);
  spec.season = SeasonClock::make(2.0, rho, delta);
  return spec;
}

Field gaussian_seed(const Problem& p) { return make_initial(SeedSpec{}, p.grid); }

}  // namespace

TEST_CASE("persistence example") {
  const Problem p = build_problem(wrap_with_delta(0.6));
  const auto v = classify_run(p, gaussian_seed(p));
  CHECK(v.lambda_p_omega == doctest::Approx(-0.2).epsilon(1e-10));
  CHECK(v.predicted == Prediction::persistence);
  CHECK(v.observed == Outcome::persistent);
  CHECK(v.agrees());
  REQUIRE(v.orbit_start.has_value());
  CHECK(v.theta_to_orbit < 1e-4);
  CHECK(v.sup_history.size() == 301);
  CHECK(v.theta_history.size() == 301);
  CHECK(v.final_state.minCoeff() > 0.0);
  CHECK(decay_rate_check(v, p.clock).skipped);
  // After a short transient the distance to the orbit never grows, down to
  // the accuracy the orbit itself was computed to.
  const double floor = 10.0 * ClassifyOptions{}.periodic_tol;
  for (std::size_t i = 6; i < v.theta_history.size(); ++i)
    CHECK(v.theta_history[i] <= std::max(v.theta_history[i - 1], floor));
}

TEST_CASE("extinction example") {
  const Problem p = build_problem(wrap_with_delta(2.0));
  const auto v = classify_run(p, gaussian_seed(p));
  CHECK(v.lambda_p_omega == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(v.predicted == Prediction::extinction);
  CHECK(v.observed == Outcome::extinct);
  CHECK(v.agrees());
  CHECK_FALSE(v.orbit_start.has_value());
  CHECK(v.theta_history.empty());
  CHECK(std::isfinite(v.per_period_ratio));
  const auto& sup = v.sup_history;
  CHECK(sup.back() < 1e-6 * sup.front());
  for (std::size_t i = sup.size() - 10; i < sup.size(); ++i) CHECK(sup[i] < sup[i - 1]);
  const auto rate = decay_rate_check(v, p.clock);
  CHECK_FALSE(rate.skipped);
  CHECK(rate.passed);
  CHECK(rate.linear_rate == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK(rate.ratio <= rate.bound);
}

TEST_CASE("zero initial data is degenerate") {
  const Problem p = build_problem(wrap_with_delta(0.6));
  const auto v = classify_run(p, Field::Zero(101));
  CHECK(v.degenerate_input);
  CHECK(v.observed == Outcome::extinct);
  CHECK(v.predicted == Prediction::persistence);
  CHECK_FALSE(v.agrees());
}

TEST_CASE("classify_run argument checks") {
  const Problem p = build_problem(wrap_with_delta(0.6));
  ClassifyOptions short_run;
  short_run.periods = 49;
  CHECK_THROWS_AS(classify_run(p, gaussian_seed(p), short_run), InvalidArgument);
  Field neg = gaussian_seed(p);
  neg[4] = -0.1;
  CHECK_THROWS_AS(classify_run(p, neg), InvalidArgument);
  CHECK_THROWS_AS(classify_run(p, Field::Ones(7)), InvalidArgument);
}

TEST_CASE("linear model decays at exactly the Floquet rate") {
  auto spec = oracle::heterogeneous_spec();
  spec.growth.family = GrowthFamily::linear;
  spec.season = SeasonClock::make(2.0, 0.4, 2.5);
  const Problem p = build_problem(spec);
  ClassifyOptions opts;
  opts.substeps = 1024;
  opts.periods = 60;
  const auto v = classify_run(p, gaussian_seed(p), opts);
  REQUIRE(v.predicted == Prediction::extinction);
  CHECK(v.observed == Outcome::extinct);
  const double rate = std::exp(-v.lambda_p_omega * p.clock.omega);
  CHECK(std::abs(v.per_period_ratio - rate) <= 1e-6);
}

TEST_CASE("logistic decay is no slower than the linear rate") {
  auto spec = oracle::heterogeneous_spec();
  spec.season = SeasonClock::make(2.0, 0.4, 2.5);
  const Problem p = build_problem(spec);
  const auto v = classify_run(p, make_initial(SeedSpec{SeedSpec::Kind::constant, 2.0}, p.grid));
  const auto rate = decay_rate_check(v, p.clock);
  CHECK_FALSE(rate.skipped);
  CHECK(rate.passed);
  CHECK(rate.ratio <= rate.linear_rate + 0.02);
}

TEST_CASE("marginal predictions are not scored") {
  // lambda_p_omega = delta rho - (1 - rho) = 0 at delta = 1, rho = 0.5.
  const Problem p = build_problem(wrap_with_delta(1.0));
  ClassifyOptions opts;
  opts.periods = 50;
  const auto v = classify_run(p, gaussian_seed(p), opts);
  CHECK(std::abs(v.lambda_p_omega) <= 1e-12);
  CHECK(v.predicted == Prediction::marginal);
  CHECK(v.agrees());
  CHECK(decay_rate_check(v, p.clock).skipped);
}

TEST_CASE("the fate does not depend on the positive initial state") {
  const Problem p = build_problem(oracle::heterogeneous_spec());
  std::mt19937 rng(40);
  std::uniform_real_distribution<double> U(0.0, 2.0);
  std::optional<Field> first;
  for (int trial = 0; trial < 3; ++trial) {
    Field u0(101);
    for (auto& x : u0) x = U(rng);
    const auto v = classify_run(p, u0);
    CHECK(v.observed == Outcome::persistent);
    if (!first) {
      first = v.final_state;
      continue;
    }
    CHECK(theta_metric(v.final_state, *first) < 1e-6);
  }
}

TEST_CASE("dichotomy grid") {
  const SeedSpec seed{};
  const std::vector<double> deltas = {0.3, 1.5, 3.0};
  const std::vector<double> rhos = {0.3, 0.6, 0.999};
  const auto rows = dichotomy_grid(oracle::wrap_spec(1.0), seed, deltas, rhos);
  REQUIRE(rows.size() == 9);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    CHECK(r.delta == deltas[i / 3]);
    CHECK(r.rho == rhos[i % 3]);
    CHECK(r.error.empty());
    CHECK(r.lambda_p_omega == doctest::Approx(r.delta * r.rho - (1.0 - r.rho)).epsilon(1e-10));
    CHECK(std::abs(r.lambda_p_omega_floquet - r.lambda_p_omega) <= 1e-6);
    CHECK(r.agree);
  }
  // rho near 1 leaves lambda_p_omega close to delta.
  CHECK(rows[2].lambda_p_omega == doctest::Approx(0.3).epsilon(1e-2));
  CHECK(rows[2].observed == Outcome::extinct);
  CHECK_THROWS_AS(dichotomy_grid(oracle::wrap_spec(1.0), seed, {0.5}, rhos), InvalidArgument);
}

TEST_CASE("labels") {
  CHECK(to_string(Prediction::extinction) == "extinction");
  CHECK(to_string(Prediction::persistence) == "persistence");
  CHECK(to_string(Outcome::undecided) == "undecided");
}
