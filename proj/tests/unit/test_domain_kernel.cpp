#include "seasonal_dispersal/dispersal_operator.hpp"
#include "seasonal_dispersal/errors.hpp"
#include "seasonal_dispersal/grid.hpp"
#include "seasonal_dispersal/kernel.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sdisp;

TEST_CASE("grid nodes are cell midpoints") {
  const auto g = build_grid(0.0, 1.0, 4, BoundaryMode::truncated);
  CHECK(g.h == doctest::Approx(0.25));
  const double expected[] = {0.125, 0.375, 0.625, 0.875};
  for (int i = 0; i < 4; ++i) CHECK(g.nodes[i] == doctest::Approx(expected[i]).epsilon(1e-15));

  const auto w = build_grid(-10.0, 10.0, 201, BoundaryMode::periodic_wrap);
  CHECK(w.n == 201);
  CHECK(w.h == doctest::Approx(20.0 / 201.0).epsilon(1e-15));
  for (std::size_t i = 1; i < w.n; ++i)
    CHECK(w.nodes[i] - w.nodes[i - 1] == doctest::Approx(w.h).epsilon(1e-12));
}

TEST_CASE("grid rejects degenerate input") {
  CHECK_THROWS_AS(build_grid(-1.0, 1.0, 2, BoundaryMode::truncated), InvalidArgument);
  CHECK_THROWS_AS(build_grid(1.0, 1.0, 10, BoundaryMode::truncated), InvalidArgument);
  CHECK_THROWS_AS(build_grid(0.0, INFINITY, 10, BoundaryMode::truncated), InvalidArgument);
  CHECK(boundary_mode_from_string("periodic") == BoundaryMode::periodic_wrap);
  CHECK_THROWS_AS(boundary_mode_from_string("mirror"), InvalidArgument);
}

TEST_CASE("wrapped distance takes the short way round") {
  const auto g = build_grid(0.0, 10.0, 10, BoundaryMode::periodic_wrap);
  CHECK(g.distance(0, 9) == doctest::Approx(1.0));
  CHECK(g.distance(0, 5) == doctest::Approx(5.0));
  const auto t = build_grid(0.0, 10.0, 10, BoundaryMode::truncated);
  CHECK(t.distance(0, 9) == doctest::Approx(9.0));
}

TEST_CASE("tent kernel values") {
  const auto k1 = Kernel::tent(1.0);
  CHECK(eval_kernel(k1, 0.0) == doctest::Approx(1.0));
  CHECK(eval_kernel(k1, 2.0) == 0.0);
  CHECK(eval_kernel(Kernel::tent(2.0), 1.0) == doctest::Approx(0.25));
  CHECK(eval_kernel(Kernel::tent(2.0), -1.0) == doctest::Approx(0.25));
}

TEST_CASE("built-in kernels have unit mass and compact support") {
  const Kernel kernels[] = {Kernel::tent(1.3), Kernel::epanechnikov(0.7),
                            Kernel::truncated_gaussian(2.0, 0.8),
                            Kernel::truncated_gaussian(1.0, 5.0)};
  for (const auto& k : kernels) {
    const auto f = [&](double z) { return k(z); };
    // Split at 0 so the tent's kink sits on a panel edge.
    const double mass = oracle::gauss_legendre(f, -k.gamma(), 0.0, 4000) +
                        oracle::gauss_legendre(f, 0.0, k.gamma(), 4000);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(k(0.0) > 0.0);
    CHECK(k(k.gamma() * 1.0001) == 0.0);
    CHECK(k(-k.gamma() * 1.5) == 0.0);
    for (double z = -k.gamma(); z <= k.gamma(); z += k.gamma() / 17.0) {
      CHECK(k(z) >= 0.0);
      CHECK(k(z) == doctest::Approx(k(-z)).epsilon(1e-14));
    }
  }
}

TEST_CASE("truncated gaussian matches its closed-form density") {
  const double gamma = 1.5, sigma = 0.6;
  const auto k = Kernel::truncated_gaussian(gamma, sigma);
  const double mass = std::erf(gamma / (sigma * std::sqrt(2.0)));
  const double z = 0.4;
  const double expected = std::exp(-z * z / (2 * sigma * sigma)) /
                          (sigma * std::sqrt(2 * std::numbers::pi)) / mass;
  CHECK(k(z) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("tabulated kernel is renormalized") {
  const auto k = Kernel::tabulated(2.0, {0.0, 1.0, 3.0, 1.0, 0.0});
  const auto f = [&](double z) { return k(z); };
  double mass = 0.0;
  for (int p = 0; p < 4; ++p)  // piecewise linear between samples
    mass += oracle::gauss_legendre(f, -2.0 + p, -1.0 + p, 1);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k(0.5) == doctest::Approx(0.5 * (k(0.0) + k(1.0))));
  CHECK_THROWS_AS(Kernel::tabulated(1.0, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(Kernel::tabulated(1.0, {1.0, 0.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(Kernel::tabulated(1.0, {0.0, -1.0, 2.0, 1.0, 0.0}), InvalidArgument);
}

TEST_CASE("single operator entry by hand quadrature") {
  const auto g = build_grid(0.0, 3.0, 3, BoundaryMode::truncated);
  const auto op = assemble_operator(g, Kernel::tent(1.5), 1.0, true);
  CHECK(op.W(0, 1) == doctest::Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK(op.W(0, 0) == doctest::Approx(1.0 / 1.5).epsilon(1e-15));
  CHECK(op.W(0, 2) == 0.0);
}

TEST_CASE("operator structure") {
  std::mt19937 rng(7);
  for (auto mode : {BoundaryMode::truncated, BoundaryMode::periodic_wrap}) {
    const auto g = build_grid(-5.0, 5.0, 80, mode);
    for (const auto& k : {Kernel::tent(1.0), Kernel::epanechnikov(2.0),
                          Kernel::truncated_gaussian(1.5, 0.7)}) {
      const auto op = assemble_operator(g, k, 1.0, false);
      CHECK((op.W - op.W.transpose()).cwiseAbs().maxCoeff() == 0.0);
      CHECK(op.W.minCoeff() >= 0.0);
      CHECK(op.W.diagonal().minCoeff() > 0.0);
      for (std::size_t i = 0; i < g.n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < g.n; ++j) sum += k(g.distance(i, j)) * g.h;
        CHECK(op.row_sums[static_cast<Eigen::Index>(i)] == doctest::Approx(sum).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("wrap normalization makes rows stochastic and annihilates constants") {
  const auto g = build_grid(-10.0, 10.0, 201, BoundaryMode::periodic_wrap);
  for (const auto& k : {Kernel::tent(1.0), Kernel::truncated_gaussian(3.0, 1.0)}) {
    const auto op = assemble_operator(g, k, 0.7, true);
    CHECK(op.rows_normalized);
    CHECK((op.W.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    const Field c = Field::Constant(201, 3.25);
    CHECK(apply_L(op, c).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("truncated mode loses mass at the boundary") {
  const auto g = build_grid(-3.0, 3.0, 60, BoundaryMode::truncated);
  const auto op = assemble_operator(g, Kernel::tent(1.0), 2.0, true);
  CHECK_FALSE(op.rows_normalized);
  const double c = 1.5;
  const Field Lu = apply_L(op, Field::Constant(60, c));
  for (Eigen::Index i = 0; i < 60; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < 60; ++j) row += op.W(i, j);
    CHECK(Lu[i] == doctest::Approx(2.0 * c * (row - 1.0)).epsilon(1e-12));
    CHECK(Lu[i] <= 1e-12);
  }
  CHECK(Lu[0] < -0.1);
  CHECK(Lu[59] < -0.1);
}

TEST_CASE("apply_L on an indicator extracts one column") {
  const auto g = build_grid(0.0, 4.0, 20, BoundaryMode::truncated);
  const auto op = assemble_operator(g, Kernel::epanechnikov(0.9), 1.3, true);
  Field e = Field::Zero(20);
  e[7] = 2.0;
  const Field Lu = apply_L(op, e);
  for (Eigen::Index j = 0; j < 20; ++j)
    CHECK(Lu[j] == doctest::Approx(1.3 * (op.W(j, 7) * 2.0 - (j == 7 ? 2.0 : 0.0))));
  CHECK_THROWS_AS(apply_L(op, Field::Zero(19)), InvalidArgument);
}

TEST_CASE("mass dissipativity in truncated mode") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto g = build_grid(-4.0, 4.0, 90, BoundaryMode::truncated);
  const auto op = assemble_operator(g, Kernel::tent(1.2), 1.0, true);
  for (int trial = 0; trial < 50; ++trial) {
    Field u(90);
    for (auto& v : u) v = U(rng);
    CHECK(apply_L(op, u).sum() <= 1e-12 * u.maxCoeff());
  }
}

TEST_CASE("unresolved kernels and wrap aliasing are refused") {
  const auto g = build_grid(0.0, 10.0, 100, BoundaryMode::truncated);
  CHECK_THROWS_AS(assemble_operator(g, Kernel::tent(0.05), 1.0, true), HypothesisViolation);
  // tent with gamma = h vanishes at the neighbour distance: no coupling
  CHECK_THROWS_AS(assemble_operator(g, Kernel::tent(0.1), 1.0, true), HypothesisViolation);
  try {
    assemble_operator(g, Kernel::tent(0.05), 1.0, true);
  } catch (const HypothesisViolation& e) {
    CHECK(std::string(e.what()).find("kernel unresolved by grid") != std::string::npos);
  }
  const auto w = build_grid(0.0, 3.0, 30, BoundaryMode::periodic_wrap);
  CHECK_THROWS_AS(assemble_operator(w, Kernel::tent(2.0), 1.0, true), HypothesisViolation);
  CHECK_THROWS_AS(assemble_operator(g, Kernel::tent(1.0), 0.0, true), InvalidArgument);
  CHECK_THROWS_AS(assemble_operator(g, Kernel::epanechnikov(0.1), 1.0, true), HypothesisViolation);
  CHECK_NOTHROW(assemble_operator(g, Kernel::epanechnikov(0.15), 1.0, true));
}

TEST_CASE("refinement order of the midpoint discretization") {
  // Smooth periodic u on a circle; the continuum operator is evaluated by
  // Gauss-Legendre quadrature of int J(z) u(x - z) dz.
  const double L = 20.0;
  const auto u = [&](double x) { return std::cos(2 * std::numbers::pi * x / L) + 0.3 * std::sin(6 * std::numbers::pi * x / L); };
  const auto k = Kernel::epanechnikov(1.0);
  std::vector<double> err;
  for (std::size_t n : {100, 200, 400}) {
    const auto g = build_grid(-10.0, 10.0, n, BoundaryMode::periodic_wrap);
    const auto op = assemble_operator(g, k, 1.0, false);
    const Field Lu = apply_L(op, sample(g, u));
    double e = 0.0;
    for (std::size_t i = 0; i < n; i += n / 50) {
      const double x = g.nodes[static_cast<Eigen::Index>(i)];
      const double ref =
          oracle::gauss_legendre([&](double z) { return k(z) * u(x - z); }, -1.0, 1.0, 200) - u(x);
      e = std::max(e, std::abs(Lu[static_cast<Eigen::Index>(i)] - ref));
    }
    err.push_back(e);
  }
  const double order1 = std::log2(err[0] / err[1]);
  const double order2 = std::log2(err[1] / err[2]);
  CHECK(order1 >= 1.8);
  CHECK(order2 >= 1.8);
}

TEST_CASE("H2 report against brute-force column sums") {
  const auto g = build_grid(-1.0, 1.0, 20, BoundaryMode::truncated);
  const auto op = assemble_operator(g, Kernel::tent(4.0), 1.0, true);
  const Field b = g.nodes;
  double lhs = INFINITY;
  for (Eigen::Index j = 0; j < 20; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < 20; ++i) col += Kernel::tent(4.0)(g.nodes[i] - g.nodes[j]) * g.h;
    lhs = std::min(lhs, col);
  }
  const auto r = check_H2(op, b);
  CHECK(r.lhs == doctest::Approx(lhs).epsilon(1e-13));
  CHECK(r.rhs == doctest::Approx(b.maxCoeff() - b.minCoeff()));
  CHECK(r.satisfied == (lhs > r.rhs));
  CHECK_FALSE(r.satisfied);

  CHECK(check_H2(op, Field::Constant(20, 3.0)).rhs == 0.0);
  CHECK(check_H2(op, Field::Constant(20, 3.0)).satisfied);
  const auto big_d = assemble_operator(g, Kernel::tent(4.0), 1e3, true);
  CHECK(check_H2(big_d, b).satisfied);
}
