#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "brwlab/manytoone.hpp"
#include "brwlab/rng.hpp"
#include "brwlab/simulator.hpp"
#include "brwlab/stats.hpp"

using namespace brwlab;

TEST_CASE("p = 0 collapses to the deterministic e^{beta t}") {
  // the weight does not depend on the path, so every replica is identical
  const ModelParams params{1.0, 0.7, 0.0};
  const auto est = expected_population(params, 2.5, 200, 11);
  CHECK(est.mean == doctest::Approx(std::exp(0.7 * 2.5)).epsilon(1e-12));
  CHECK(est.standard_error == doctest::Approx(0.0));
  CHECK(est.replicas == 200);
  CHECK(est.hits == 200);
}

TEST_CASE("estimate grows with the horizon") {
  const ModelParams params{1.0, 0.5, 0.5};
  double prev = 0.0;
  for (double t : {0.5, 1.0, 2.0}) {
    const auto est = expected_population(params, t, 20000, 13);
    CHECK(est.mean > prev);
    prev = est.mean;
  }
}

TEST_CASE("p = 1 mean respects the crude exponential-moment bound") {
  // |X_s| <= J_s (total jump count), and E[e^{beta J_t}] = e^{2 lambda t (e^beta - 1)}
  const ModelParams params{1.0, 0.4, 1.0};
  const double t = 1.5;
  const auto est = expected_population(params, t, 50000, 17);
  const double bound =
      std::exp(2.0 * params.lambda * t * (std::exp(params.beta) - 1.0));
  CHECK(est.mean > 1.0);
  CHECK(est.mean - 3.0 * est.standard_error < bound);
}

TEST_CASE("agrees with direct branching simulation") {
  const Rng root(23);
  for (double p : {0.5, 1.0}) {
    const ModelParams params{1.0, 0.8, p};
    const double t = 1.5;
    std::vector<double> direct;
    for (int i = 0; i < 20000; ++i) {
      SimConfig cfg{params};
      cfg.t_max = t;
      cfg.sample_grid = {t};
      cfg.seed = root.split(static_cast<std::uint64_t>(p * 10) * 100000 + i)
                     .key();
      direct.push_back(static_cast<double>(simulate(cfg).population.back()));
    }
    const auto [dm, ds] = mean_and_se(direct);
    const auto est = expected_population(params, t, 100000, 29);
    CHECK(std::abs(est.mean - dm) <=
          3.0 * std::hypot(ds, est.standard_error));
  }
}

TEST_CASE("p > 1 refuses the full expectation but not the corridor") {
  CHECK_THROWS_AS(expected_population({1.0, 1.0, 1.5}, 1.0, 100, 1),
                  std::domain_error);
  // confined paths carry bounded weight, so the corridor version stays finite
  const auto est = corridor_expectation({1.0, 1.0, 2.0},
                                        [](double) { return 0.0; }, 1.5, 1.0,
                                        2000, 1);
  CHECK(std::isfinite(est.mean));
  CHECK(est.mean <= std::exp(1.0));  // |X| <= 1 inside, so weight <= e^{t}
  CHECK(est.hits > 0);
}

TEST_CASE("a corridor wider than any path reproduces the full expectation") {
  const ModelParams params{1.0, 0.5, 0.5};
  const double t = 1.0;
  const auto full = expected_population(params, t, 20000, 31);
  const auto wide = corridor_expectation(params, [](double) { return 0.0; },
                                         1e9, t, 20000, 31);
  CHECK(wide.mean == full.mean);
  CHECK(wide.standard_error == full.standard_error);
  CHECK(wide.hits == full.hits);
}

TEST_CASE("corridor estimate never exceeds the full one at equal seeds") {
  const ModelParams params{1.0, 0.5, 0.5};
  const double t = 2.0;
  const auto full = expected_population(params, t, 5000, 37);
  for (double delta : {0.5, 1.0, 2.0, 4.0}) {
    const auto corr = corridor_expectation(
        params, [](double) { return 0.0; }, delta, t, 5000, 37);
    CHECK(corr.mean <= full.mean);
    CHECK(corr.hits <= full.hits);
  }
}

TEST_CASE("corridor hit fraction with beta = 0 matches the never-leave law") {
  // P(walk stays at 0 up to t) = e^{-2 lambda t} when delta < 1
  const ModelParams params{1.0, 0.0, 0.0};
  const double t = 1.0;
  const int n = 100000;
  const auto est = corridor_expectation(params, [](double) { return 0.0; },
                                        0.5, t, n, 41);
  const double p = std::exp(-2.0 * params.lambda * t);
  const double se = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(est.mean - p) <= 3.0 * se);
  CHECK(est.hits == static_cast<std::int64_t>(std::llround(est.mean * n)));
}

TEST_CASE("corridor widens monotonically in delta") {
  const ModelParams params{1.0, 0.5, 0.5};
  double prev = -1.0;
  for (double delta : {0.5, 1.5, 3.0}) {
    const auto est = corridor_expectation(
        params, [](double s) { return 0.5 * s; }, delta, 2.0, 5000, 43);
    CHECK(est.mean >= prev);
    prev = est.mean;
  }
}

TEST_CASE("input guards") {
  CHECK_THROWS_AS(expected_population({1, 1, 0.5}, -1.0, 100, 1),
                  std::domain_error);
  CHECK_THROWS_AS(expected_population({1, 1, 0.5}, 1.0, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(corridor_expectation({1, 1, 0.5},
                                       [](double) { return 0.0; }, 0.0, 1.0,
                                       100, 1),
                  std::domain_error);
}
