#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "brwlab/analytics.hpp"

using namespace brwlab;

namespace {
// independent 50-digit evaluations of the closed forms
constexpr double kG2 = 0.53972077083991796413;            // g(2)
constexpr double kThetaHat1 = 2.4771365931481281095;      // g(theta) = 1
constexpr double kSpeed1 = 2.0734446842053410047;         // theta - 1/theta at kThetaHat1
}  // namespace

TEST_CASE("g at the pinned points") {
  CHECK(g(1.0) == 0.0);
  CHECK(g(2.0) == doctest::Approx(kG2).epsilon(1e-12));
  CHECK_THROWS_AS(g(0.0), std::domain_error);
  CHECK_THROWS_AS(g(-1.0), std::domain_error);
}

TEST_CASE("g strictly increasing on [1, inf)") {
  double prev = g(1.0);
  for (double th = 1.05; th < 40.0; th *= 1.17) {
    const double cur = g(th);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("solve_theta_hat hits the transcendental root") {
  CHECK(solve_theta_hat({1.0, 1.0, 0.0}) ==
        doctest::Approx(kThetaHat1).epsilon(1e-11));
  const double sets[][2] = {{1, 1}, {0.5, 1}, {3, 1}, {1, 7}, {2.5, 0.3}};
  for (const auto& s : sets) {
    const ModelParams params{s[0], s[1], 0.0};
    const double th = solve_theta_hat(params);
    CHECK(th > 1.0);
    CHECK(std::abs(g(th) - params.beta / params.lambda) <= 1e-10);
  }
  // beta/lambda -> 0+ pushes the root to 1
  CHECK(solve_theta_hat({1.0, 1e-10, 0.0}) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_THROWS_AS(solve_theta_hat({0.0, 1.0, 0.0}), std::domain_error);
}

TEST_CASE("rate function basics") {
  CHECK(rate_function(0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(rate_function(-1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(rate_function(1.0, 0.0), std::domain_error);

  // Lambda(lambda(theta - 1/theta)) = lambda*g(theta)
  const double thetas[] = {1.0, 1.5, 2.0, 5.0, 20.0};
  const double lambdas[] = {0.5, 1.0, 3.0};
  for (double lam : lambdas)
    for (double th : thetas) {
      const double x = lam * (th - 1.0 / th);
      CHECK(std::abs(rate_function(x, lam) - lam * g(th)) <= 1e-10);
    }
}

TEST_CASE("rate function is convex, increasing, and ~ x log x") {
  double prev = 0.0;
  double prev_d = rate_function_derivative(0.0, 1.0);
  for (double x = 0.25; x < 200.0; x += 0.25) {
    const double v = rate_function(x, 1.0);
    const double d = rate_function_derivative(x, 1.0);
    CHECK(v > prev);
    CHECK(d >= prev_d - 1e-12);
    prev = v;
    prev_d = d;
  }
  const double r8 = rate_function(1e8, 1.0) / (1e8 * std::log(1e8));
  const double r10 = rate_function(1e10, 1.0) / (1e10 * std::log(1e10));
  CHECK(r8 > 0.9);
  CHECK(r10 > r8);
  CHECK(r10 < 1.0);
}

TEST_CASE("rate function inverse round trips") {
  CHECK(rate_function_inverse(0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(rate_function_inverse(-1.0, 1.0), std::domain_error);
  for (double lam : {0.5, 1.0, 3.0})
    for (double x = 1e-6; x <= 1e3; x *= 7.3) {
      const double y = rate_function(x, lam);
      CHECK(rate_function_inverse(y, lam) == doctest::Approx(x).epsilon(1e-8));
    }
  // Lambda^-1(beta) equals the p=0 speed via the g identity
  const ModelParams params{1.0, 1.0, 0.0};
  CHECK(rate_function_inverse(params.beta, params.lambda) ==
        doctest::Approx(kSpeed1).epsilon(1e-8));
}

TEST_CASE("classify covers the four regimes") {
  CHECK(classify({1, 1, 0.0}).regime == Regime::kPZero);
  CHECK(classify({1, 1, 0.5}).regime == Regime::kPIn01);
  CHECK(classify({1, 1, 1.0}).regime == Regime::kPOne);
  CHECK(classify({1, 1, 2.0}).regime == Regime::kExplosive);

  const auto half = classify({1, 1, 0.5});
  CHECK(half.b_hat == doctest::Approx(2.0));
  CHECK(half.c_hat == doctest::Approx(0.25));  // (beta(1-p)^2/p)^b_hat
  CHECK(classify({1, 2, 1.0}).exp_rate == doctest::Approx(2.0));
}

TEST_CASE("predict_rightmost per regime") {
  const ModelParams p0{1, 1, 0.0};
  CHECK(predict_rightmost(p0, 10.0) / 10.0 ==
        doctest::Approx(predict_rightmost(p0, 40.0) / 40.0).epsilon(1e-12));
  CHECK(predict_rightmost(p0, 10.0) / 10.0 ==
        doctest::Approx(rightmost_speed(p0)).epsilon(1e-12));

  const ModelParams p1{1, 2, 1.0};
  CHECK(std::log(predict_rightmost(p1, 9.0)) / 3.0 == doctest::Approx(2.0));

  CHECK_THROWS_AS(predict_rightmost({1, 1, 1.5}, 10.0), std::domain_error);
  CHECK_THROWS_AS(predict_rightmost({1, 1, 0.5}, 2.0), std::domain_error);
}

TEST_CASE("normalization inverts the predictions") {
  for (double p : {0.0, 0.5, 1.0}) {
    const ModelParams params{1.0, 1.0, p};
    const double t = 100.0;
    const double r = predict_rightmost(params, t);
    CHECK(normalize_rightmost(params, r, t) ==
          doctest::Approx(normalized_limit(params)).epsilon(1e-9));
  }
}

TEST_CASE("optimal path: affine for p = 0") {
  const ModelParams params{1, 1, 0.0};
  const std::vector<double> grid{1.0, 2.0, 5.0, 9.0};
  const auto f = optimal_path(params, grid);
  const double speed = rightmost_speed(params);
  for (std::size_t i = 1; i < grid.size(); ++i)
    CHECK((f[i] - f[i - 1]) / (grid[i] - grid[i - 1]) ==
          doctest::Approx(speed).epsilon(1e-7));
}

TEST_CASE("optimal path: constant when beta = 0") {
  const ModelParams params{1, 0.0, 0.5};
  const auto f = optimal_path(params, std::vector<double>{1.0, 3.0, 10.0}, 2.0);
  for (double v : f) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("optimal path approaches the p in (0,1) asymptotic") {
  // the correction is logarithmic, so check the local exponent and that the
  // ratio to c_hat (t/log t)^b_hat shrinks monotonically
  const ModelParams params{1, 1, 0.5};
  const auto pred = classify(params);
  const std::vector<double> grid{1.0, 1e4, 1e6, 1e8};
  const auto f = optimal_path(params, grid);
  double prev_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t = grid[i];
    const double limit = pred.c_hat * std::pow(t / std::log(t), pred.b_hat);
    const double ratio = f[i] / limit;
    CHECK(ratio > 1.0);
    CHECK(ratio < prev_ratio);
    prev_ratio = ratio;
  }
  const double exponent = (std::log(f[3]) - std::log(f[2])) /
                          (std::log(grid[3]) - std::log(grid[2]));
  CHECK(exponent > 1.6);
  CHECK(exponent < 2.0);
}

TEST_CASE("optimal path slope matches the p = 0 regime as p -> 0") {
  const ModelParams params{1, 1, 0.001};
  const std::vector<double> grid{1.0, 100.0, 101.0};
  const auto f = optimal_path(params, grid);
  const double slope = f[2] - f[1];
  CHECK(std::abs(slope / rightmost_speed({1, 1, 0.0}) - 1.0) < 0.01);
}

TEST_CASE("optimal path rejects bad inputs") {
  const ModelParams params{1, 1, 0.5};
  CHECK_THROWS_AS(optimal_path({1, 1, 2.0}, std::vector<double>{1.0, 2.0}),
                  std::domain_error);
  CHECK_THROWS_AS(optimal_path(params, std::vector<double>{0.0, 1.0}),
                  std::domain_error);
  CHECK_THROWS_AS(optimal_path(params, std::vector<double>{1.0, 2.0}, 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(optimal_path(params, std::vector<double>{2.0, 1.0}),
                  std::domain_error);
}

TEST_CASE("model params validation") {
  CHECK_THROWS_AS(ModelParams(-1, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(1, -1, 0), std::invalid_argument);
  CHECK_THROWS_AS(ModelParams(1, 1, -0.5), std::invalid_argument);
  CHECK_NOTHROW(ModelParams(0, 1, 0));  // motionless Yule setup
  CHECK_NOTHROW(ModelParams(1, 0, 0));  // single plain walk
}
