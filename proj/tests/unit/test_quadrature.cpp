// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "smoothing/errors.hpp"
#include "smoothing/quadrature.hpp"

using namespace smoothing;

TEST_CASE("smooth integrals agree with an independent Gauss-Kronrod") {
  auto f = [](double x) { return std::exp(-x) * std::cos(3.0 * x); };
  const double ours = integrate(f, 0.0, 5.0).value;
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 5.0);
  CHECK(ours == doctest::Approx(oracle).epsilon(1e-13));
}

TEST_CASE("integrable endpoint singularity") {
  // int_0^1 log(x) dx = -1 and int_0^1 x^(-1/2) dx = 2.
  CHECK(integrate([](double x) { return std::log(x); }, 0.0, 1.0).value ==
        doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                  {1e-10, 0.0, 4000})
            .value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("panels and half line") {
  const double cuts[] = {0.0, 0.5, 2.0, 3.0};
  CHECK(integrate_panels([](double x) { return x * x; }, cuts).value ==
        doctest::Approx(9.0).epsilon(1e-14));
  const auto tail = integrate_to_infinity([](double x) { return std::exp(-x * x); }, 0.0, 1.0);
  CHECK(tail.value == doctest::Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(1e-13));
}

TEST_CASE("budget exhaustion raises") {
  CHECK_THROWS_AS(integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, {1e-12, 0.0, 20}),
                  QuadratureError);
  CHECK_THROWS_AS(integrate([](double x) { return x; }, 0.0, INFINITY), DomainError);
}
