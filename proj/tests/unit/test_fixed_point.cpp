// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "smoothing/errors.hpp"
#include "smoothing/fixed_point.hpp"

using namespace smoothing;

TEST_CASE("extinction probabilities") {
  CHECK(extinction_beta(OffspringLaw(offspring::Deterministic{1}), 1.0) == 0.0);
  const double rho = 0.9, a = 0.8;
  CHECK(extinction_beta(OffspringLaw(offspring::Binary{rho}), a) ==
        doctest::Approx(1.0 - (2 * a * rho - 1) / (rho * a * a)).epsilon(1e-12));
  for (double p : {0.6, 0.75, 0.9}) {
    CHECK(extinction_beta(OffspringLaw(offspring::Geometric{p}), 2 * (1 - p) / p) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK_THROWS_AS(extinction_beta(OffspringLaw(offspring::Deterministic{1}), 0.5), ValidationError);
}

TEST_CASE("omega and Omega for phi = x^(n+1), alpha = 1") {
  for (int n : {1, 2, 3}) {
    const FixedPointSolver solver(OffspringLaw(offspring::Deterministic{n}), 1.0);
    CHECK(solver.lower_bound() == 0.0);
    for (double x : {0.05, 0.3, 0.7, 0.99}) {
      const double omega = n / (std::pow(x, n + 1) - x) + 1.0 / (1.0 - x);
      CHECK(solver.omega(x) == doctest::Approx(omega).epsilon(1e-12));
      // Omega(x) = (x^-n - 1) / (n (1 - x)).
      CHECK(solver.omega_cap(x) ==
            doctest::Approx((std::pow(x, -n) - 1.0) / (n * (1.0 - x))).epsilon(1e-11));
    }
    CHECK(solver.omega_cap(1.0) == 1.0);
    CHECK(solver.omega_limit() == doctest::Approx(-(n + 1.0) / 2.0));
  }
}

TEST_CASE("Omega for the binary and square-geometric families") {
  const double rho = 0.9, a = 0.8;
  const FixedPointSolver binary(OffspringLaw(offspring::Binary{rho}), a);
  for (double x : {0.45, 0.6, 0.9}) {
    CHECK(binary.omega_cap(x) ==
          doctest::Approx((2 * a * rho - 1) / (a * rho * x + a * rho - 1)).epsilon(1e-11));
  }
  const double p = 0.8;
  const double alpha6 = -2 * p * (1 - p) / (2 * p * p - 4 * p + 1);
  const FixedPointSolver square(OffspringLaw(offspring::SquareGeometric{p}), alpha6);
  for (double x : {0.8, 0.9, 0.97}) {
    CHECK(square.omega_cap(x) ==
          doctest::Approx(std::pow((1 - p) / (1 + p * (x - 2)), 2)).epsilon(1e-9));
  }
}

TEST_CASE("omega limit at 1 carries the alpha factor") {
  const OffspringLaw law(offspring::Geometric{0.75});
  const double a = 2.0 / 3.0;
  const FixedPointSolver solver(law, a);
  const double x = 1.0 - 1e-3;
  // Defining expression, fine at this distance from 1.
  const double direct = (a * 3.0 - 1.0) / (a * law.pgf(x) - x + 1.0 - a) + 1.0 / (1.0 - x);
  CHECK(solver.omega(x) == doctest::Approx(direct).epsilon(1e-9));
  CHECK(solver.omega_limit() == doctest::Approx(-a * 18.0 / 2.0));
  CHECK(std::abs(solver.omega(1.0 - 1e-5) - solver.omega_limit()) < 1e-3);
}

TEST_CASE("solve_u inverts the implicit equation") {
  const FixedPointSolver solver(OffspringLaw(offspring::Geometric{0.75}), 2.0 / 3.0);
  CHECK(solver.solve_u(0.0) == 1.0);
  for (double t : {1e-3, 0.5, 3.0, 20.0, 1e4}) {
    const double u = solver.solve_u(t);
    CHECK(solver.implicit_residual(t, u) <= 1e-11 * std::max(1.0, t));
    // Example 4's u in closed form.
    const double closed = 2.0 / 3.0 + 2.0 / 3.0 / (std::sqrt(4 * t + 1) + 1);
    CHECK(u == doctest::Approx(closed).epsilon(1e-10));
  }
  CHECK_THROWS_AS(solver.solve_u(-1.0), DomainError);
  CHECK_THROWS_AS(solver.solve_u(1e300), RangeError);
  CHECK_THROWS_AS(solver.omega(0.5), DomainError);
}

TEST_CASE("functional-equation residual") {
  const FixedPointSolver solver(OffspringLaw(offspring::Deterministic{1}), 1.0);
  auto exact = [](double t) { return 1.0 / ((1 + t / 2) * (1 + t / 2)); };
  auto wrong = [](double t) { return std::exp(-t); };
  for (double t : {0.1, 1.0, 10.0}) {
    CHECK(solver.laplace_residual(exact, t) < 1e-12);
    CHECK(solver.laplace_residual(t) < 1e-9);
    CHECK(solver.laplace_residual(wrong, t) > 1e-4);
  }
}

TEST_CASE("tabulate and config validation") {
  const FixedPointSolver solver(OffspringLaw(offspring::Deterministic{1}), 1.0);
  const double grid[] = {0.0, 1.0, 2.0};
  const auto rows = tabulate(solver, grid, false);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].u == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(rows[2].g == doctest::Approx(0.25).epsilon(1e-12));
  SolverConfig bad;
  bad.root_tol = 1e-3;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = {};
  bad.singular_window = 0.1;
  CHECK_THROWS_AS(FixedPointSolver(OffspringLaw(offspring::Deterministic{1}), 1.0, bad),
                  ValidationError);
}

TEST_CASE("differential equation residual") {
  const FixedPointSolver solver(OffspringLaw(offspring::Geometric{0.75}), 2.0 / 3.0);
  for (double t : {0.5, 2.0, 10.0}) CHECK(solver.ode_residual(t) < 1e-7);
  CHECK_THROWS_AS(solver.ode_residual(1e-5), DomainError);
}
