#include "seasonal_dispersal/errors.hpp"
#include "seasonal_dispersal/evolve.hpp"
#include "seasonal_dispersal/problem.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sdisp;

namespace {

Problem wrap_problem(double b = 1.0, GrowthFamily family = GrowthFamily::logistic) {
  auto spec = oracle::wrap_spec(b);
  spec.growth.family = family;
  return build_problem(spec);
}

Field random_positive(std::size_t n, std::mt19937& rng, double lo = 0.1, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  Field u(static_cast<Eigen::Index>(n));
  for (auto& v : u) v = U(rng);
  return u;
}

}  // namespace

TEST_CASE("decay season closed form") {
  const auto c = SeasonClock::make(2.0, 0.5, std::log(2.0));
  const Field two = Field::Constant(4, 2.0);
  CHECK(decay_season(two, c, 0.0, 1.0)[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(decay_season(two, c, 0.3, 0.3) == two);
  const auto c2 = SeasonClock::make(2.0, 0.5, 0.5);
  CHECK(decay_season(Field::Ones(3), c2, 4.0, 5.0)[1] ==
        doctest::Approx(0.6065306597126334).epsilon(1e-15));
  CHECK_THROWS_AS(decay_season(two, c2, 0.5, 1.5), InvalidArgument);
}

TEST_CASE("good-season step oracles") {
  const Problem p = wrap_problem(1.0);
  const Field zero = Field::Zero(101);
  CHECK(good_season_step(zero, p.op, p.model, 1.0, 0.1) == zero);

  // Constant state in wrap mode follows the scalar logistic ODE.
  std::vector<double> err;
  for (double dt : {0.2, 0.1, 0.05}) {
    const Field u = good_season_step(Field::Constant(101, 0.3), p.op, p.model, 1.0, dt);
    err.push_back(std::abs(u[50] - oracle::scalar_logistic(0.3, 1.0, 1.0, dt)));
    CHECK((u.array() - u[0]).abs().maxCoeff() <= 1e-15);
  }
  CHECK(err[0] / err[1] > 25.0);  // local error O(dt^5)
  CHECK(err[1] / err[2] > 25.0);
  CHECK(err[2] < 1e-9);

  const Problem lin = wrap_problem(0.7, GrowthFamily::linear);
  const Field u = good_season_step(Field::Constant(101, 2.0), lin.op, lin.model, 1.0, 0.05);
  // RK4 local error (b dt)^5 / 120 ~ 4e-10 relative
  CHECK(u[3] == doctest::Approx(2.0 * std::exp(0.7 * 0.05)).epsilon(1e-9));

  CHECK_THROWS_AS(good_season_step(zero, p.op, p.model, 0.2, 0.1), InvalidArgument);
  CHECK_THROWS_AS(good_season_step(zero, p.op, p.model, 1.95, 0.1), InvalidArgument);
}

TEST_CASE("oversized steps fail loudly") {
  const Problem p = wrap_problem(1.0);
  Field u = Field::Constant(101, 0.5);
  u[10] = 50.0;
  CHECK_THROWS_AS(good_season_step(u, p.op, p.model, 1.0, 1.0), NumericalError);
}

TEST_CASE("simulate basics") {
  const Problem p = wrap_problem(1.0);
  const Field u0 = Field::Constant(101, p.model.K0);
  const auto traj = simulate(u0, p.op, p.model, 5, 32, SavePolicy::every_substep());
  for (const auto& s : traj.states) {
    CHECK(s.minCoeff() > 0.0);
    CHECK(s.maxCoeff() <= p.model.K0 + 1e-12);
  }
  for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);

  const auto none = simulate(u0, p.op, p.model, 0, 32);
  CHECK(none.size() == 1);
  CHECK(none.states[0] == u0);

  const auto zero = simulate(Field::Zero(101), p.op, p.model, 3, 16);
  for (const auto& s : zero.states) CHECK(s.cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(simulate(u0, p.op, p.model, 1, 7), InvalidArgument);
  Field neg = u0;
  neg[0] = -1.0;
  CHECK_THROWS_AS(simulate(neg, p.op, p.model, 1, 16), InvalidArgument);
}

TEST_CASE("period-end snapshots sit exactly on multiples of omega") {
  const Problem p = wrap_problem(1.0);
  const auto traj = simulate(Field::Constant(101, 0.2), p.op, p.model, 4, 16);
  REQUIRE(traj.size() == 5);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(traj.times[i] == doctest::Approx(2.0 * static_cast<double>(i)).epsilon(1e-15));
    CHECK(traj.seasons[i] == Season::good);
  }
}

TEST_CASE("explicit snapshot times do not perturb the trajectory") {
  const Problem p = build_problem(oracle::heterogeneous_spec());
  std::mt19937 rng(1);
  const Field u0 = random_positive(101, rng);
  const auto plain = simulate(u0, p.op, p.model, 3, 20);
  const auto tagged = simulate(u0, p.op, p.model, 3, 20, SavePolicy::at({0.3, 1.0, 1.37, 2.0, 6.0}));
  REQUIRE(tagged.size() == 6);
  CHECK(tagged.seasons[1] == Season::bad);
  CHECK(tagged.states[1] == (std::exp(-0.5 * 0.3) * u0));
  CHECK(tagged.seasons[3] == Season::good);
  CHECK((tagged.states.back() - plain.states.back()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((tagged.states[4] - plain.states[1]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("global bound and positivity") {
  const Problem p = build_problem(oracle::heterogeneous_spec());
  std::mt19937 rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const Field u0 = random_positive(101, rng, 0.0, 2.0);
    const auto traj = simulate(u0, p.op, p.model, 10, default_substeps(p.op, p.model),
                               SavePolicy::every_substep());
    const double cap = std::max(u0.maxCoeff(), p.model.K0) + 1e-8;
    for (const auto& s : traj.states) {
      CHECK(s.maxCoeff() <= cap);
      CHECK(s.minCoeff() >= -1e-10 * u0.maxCoeff());
    }
  }
}

TEST_CASE("a single occupied node spreads everywhere within one good season") {
  const Problem p = wrap_problem(1.0);
  Field u0 = Field::Zero(101);
  u0[50] = 0.5;
  const auto traj = simulate(u0, p.op, p.model, 1, default_substeps(p.op, p.model));
  CHECK(traj.back().minCoeff() > 0.0);
}

TEST_CASE("part metric examples") {
  Field u(2), v(2);
  u << 1.0, 2.0;
  v << 2.0, 1.0;
  CHECK(theta_metric(u, v) == doctest::Approx(std::log(2.0)));
  CHECK(theta_metric(u, u) == 0.0);
  CHECK(theta_metric(u, 2.0 * u) == doctest::Approx(std::log(2.0)));
  // brute-force scan over alpha: smallest alpha with u/alpha <= v <= alpha u
  double best = INFINITY;
  for (double alpha = 1.0; alpha <= 3.0; alpha += 1e-5) {
    const bool ok = ((u / alpha).array() <= v.array() + 1e-15).all() &&
                    (v.array() <= (alpha * u).array() + 1e-15).all();
    if (ok) {
      best = std::log(alpha);
      break;
    }
  }
  CHECK(theta_metric(u, v) == doctest::Approx(best).epsilon(1e-4));
  Field z = u;
  z[1] = 0.0;
  CHECK_THROWS_AS(theta_metric(u, z), InvalidArgument);
}

TEST_CASE("order comparison") {
  const Problem p = build_problem(oracle::heterogeneous_spec());
  std::mt19937 rng(4);
  const Field lo = random_positive(101, rng);
  const auto a = simulate(lo, p.op, p.model, 5, 24);
  CHECK(check_order(a, a).min_gap == 0.0);
  const auto b = simulate(2.0 * lo, p.op, p.model, 5, 24);
  const auto rep = check_order(b, a);
  CHECK(rep.passed);
  CHECK(rep.min_gap >= -1e-10 * rep.scale);
  const auto other = simulate(lo, p.op, p.model, 4, 24);
  CHECK_THROWS_AS(check_order(other, a), InvalidArgument);
}

TEST_CASE("part metric is invariant across bad seasons and contracts in good seasons") {
  const Problem p = wrap_problem(1.0);
  std::mt19937 rng(9);
  const Field u0 = random_positive(101, rng), v0 = random_positive(101, rng);
  const double bad_factor = std::exp(-p.clock.delta * p.clock.bad_length());
  CHECK(std::abs(theta_metric(bad_factor * u0, bad_factor * v0) - theta_metric(u0, v0)) <= 1e-14);
  const auto tu = simulate(u0, p.op, p.model, 6, 16);
  const auto tv = simulate(v0, p.op, p.model, 6, 16);
  for (std::size_t i = 1; i < tu.size(); ++i)
    CHECK(theta_metric(tu.states[i], tv.states[i]) <
          theta_metric(tu.states[i - 1], tv.states[i - 1]) - 1e-12);
}

TEST_CASE("linear problems are integrated linearly") {
  auto spec = oracle::heterogeneous_spec();
  spec.growth.family = GrowthFamily::linear;
  spec.growth.a = {TimeProfileSpec::Kind::sine, 0.1, 0.5, 1.0, {}};
  const Problem p = build_problem(spec);
  std::mt19937 rng(6);
  const Field u0 = random_positive(101, rng);
  const Field a = simulate(u0, p.op, p.model, 3, 32).back();
  const Field b = simulate(3.7 * u0, p.op, p.model, 3, 32).back();
  CHECK((b - 3.7 * a).cwiseAbs().maxCoeff() <= 1e-12 * b.cwiseAbs().maxCoeff());
}

TEST_CASE("time-step convergence order") {
  const Problem p = build_problem(oracle::heterogeneous_spec());
  std::mt19937 rng(8);
  const Field u0 = random_positive(101, rng);
  std::vector<Field> ends;
  for (std::size_t s : {16, 32, 64}) ends.push_back(simulate(u0, p.op, p.model, 2, s).back());
  const double e1 = (ends[0] - ends[1]).cwiseAbs().maxCoeff();
  const double e2 = (ends[1] - ends[2]).cwiseAbs().maxCoeff();
  CHECK(std::log2(e1 / e2) >= 3.5);
}
