// Copyright 2026 The smoothlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "smoothing/grid.hpp"
#include "smoothing/verify.hpp"

using namespace smoothing;

namespace {

// Gamma(2, 2) drawn directly as a sum of two Exp(2), bypassing the cascade.
SampleBatch direct_gamma22(int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> exp2(2.0);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = exp2(gen) + exp2(gen);
  return SampleBatch(std::move(v), 0, seed);
}

const std::vector<double> kGrid = log_grid(1e-2, 20.0, 20);

}  // namespace

TEST_CASE("critical values") {
  CHECK(kolmogorov_critical(0.01) == doctest::Approx(1.6276).epsilon(1e-4));
  CHECK(kolmogorov_critical(0.05) == doctest::Approx(1.3581).epsilon(1e-4));
  CHECK(normal_critical(0.01) == doctest::Approx(2.5758).epsilon(1e-4));
}

TEST_CASE("Laplace comparison") {
  const auto ex1 = make_example(1, default_example_params(1));
  auto g = [&](double t) { return ex1.g(t); };
  CHECK(compare_laplace(direct_gamma22(100'000, 1), g, kGrid).pass);

  const SampleBatch ones(std::vector<double>(5000, 1.0), 0, 0);
  const double at2[] = {2.0};
  const auto bad = compare_laplace(ones, g, at2);
  CHECK_FALSE(bad.pass);
  CHECK(bad.statistic == doctest::Approx(0.25 - std::exp(-2.0)));

  const double outside[] = {25.0};
  CHECK_THROWS_AS(compare_laplace(ones, g, outside), DomainError);
}

TEST_CASE("pool batch of Example 1 passes the Laplace gate") {
  const auto ex1 = make_example(1, default_example_params(1));
  const auto spec = make_cascade_spec(ex1.offspring(), 1.0, PoolMethod{200'000, 50}, 3);
  const auto r = compare_laplace(iterate_pool(spec), [&](double t) { return ex1.g(t); }, kGrid);
  CHECK(r.pass);
  CHECK(r.statistic <= 0.005);
}

TEST_CASE("goodness of fit with an atom") {
  const auto ex1 = make_example(1, default_example_params(1));
  const auto ex4 = make_example(4, default_example_params(4));
  const auto direct = direct_gamma22(20'000, 2);
  const auto good = ks_continuous(direct, ex1);
  CHECK(good.pass);
  CHECK(good.statistic < 1.6276 / std::sqrt(20'000.0));
  CHECK_FALSE(ks_continuous(direct, ex4).pass);

  const auto spec = make_cascade_spec(ex4.offspring(), ex4.alpha(), PoolMethod{50'000, 40}, 4);
  const auto pool = iterate_pool(spec);
  CHECK(std::abs(pool.zero_fraction() - 0.5) < 0.01);
  KsOptions options;
  options.pool = true;
  CHECK(ks_continuous(pool, ex4, options).pass);

  CHECK_THROWS_AS(ks_continuous(SampleBatch({1.0, 2.0}, 0, 0), ex1), InsufficientDataError);
}

TEST_CASE("moment checks") {
  const auto ex1 = make_example(1, default_example_params(1));
  const auto spec = make_cascade_spec(ex1.offspring(), 1.0, TreeMethod{12}, 5);
  CHECK(limit_second_moment(ex1.offspring(), 1.0) == doctest::Approx(1.5));
  CHECK(moment_check(simulate_tree(spec, 20'000), spec).pass);

  const auto ex2 = make_example(2, default_example_params(2));
  const auto spec2 = make_cascade_spec(ex2.offspring(), 1.0, TreeMethod{12}, 5);
  // phi''(1) = 2 rho, E W^2 from the weight law.
  const double ew2 = weight_law_from(1.0, 1.8).moment(2);
  CHECK(limit_second_moment(ex2.offspring(), 1.0) ==
        doctest::Approx(1.8 / (1.8 * (1.8 - ew2))));
  CHECK(moment_check(simulate_tree(spec2, 20'000), spec2).pass);

  const auto spec0 = make_cascade_spec(ex1.offspring(), 1.0, TreeMethod{0}, 5);
  const auto ones = simulate_tree(spec0, 1000);
  const auto r = moment_check(ones, spec0);
  CHECK_FALSE(r.pass);
  CHECK(r.detail.find("z=0") != std::string::npos);  // mean passes exactly
}

TEST_CASE("extinction check uses the finite-generation shortfall") {
  const auto ex4 = make_example(4, default_example_params(4));
  const double b4 = generation_extinction(ex4.offspring(), ex4.alpha(), 4);
  CHECK(b4 < 0.5);
  CHECK(generation_extinction(ex4.offspring(), ex4.alpha(), 200) ==
        doctest::Approx(0.5).epsilon(1e-12));
  const auto spec = make_cascade_spec(ex4.offspring(), ex4.alpha(), TreeMethod{4}, 6);
  CHECK(extinction_check(simulate_tree(spec, 20'000), spec).pass);
}

TEST_CASE("sentinels detect their faults") {
  for (const auto& r : sentinel_records()) {
    CAPTURE(r.name);
    CHECK(r.sentinel);
    CHECK(r.pass);
  }
}

TEST_CASE("report verdict and rendering") {
  VerificationReport report;
  CHECK_FALSE(report.pass());
  report.records.push_back({"a", 0.1, 1.0, true, {0.01}, "", false});
  CHECK(report.pass());
  report.records.push_back({"b", 2.0, 1.0, false, {}, "", false});
  CHECK_FALSE(report.pass());
  CHECK(report.to_json().find("\"verdict\": \"fail\"") != std::string::npos);
  CHECK(report.summary_table().find("verdict: FAIL") != std::string::npos);
  CHECK(report.to_json() == report.to_json());
}

TEST_CASE("Laplace cap widens only below the reference batch size") {
  CHECK(scaled_gate(200'000).abs_cap == 0.005);
  CHECK(scaled_gate(1'000'000).abs_cap == 0.005);
  CHECK(scaled_gate(20'000).abs_cap == doctest::Approx(0.005 * std::sqrt(10.0)));
  CHECK(scaled_gate(20'000).se_multiple == 5.0);
}
