#pragma once

#include <span>
#include <vector>

namespace brwlab {

// Motion and breeding rates: jumps of size 1 up/down at rate lambda each,
// binary fission at rate beta*|x|^p.  beta = 0 gives a single plain walk.
struct ModelParams {
  double lambda;
  double beta;
  double p;

  ModelParams(double lambda, double beta, double p);
};

enum class Regime { kPZero, kPIn01, kPOne, kExplosive };

struct AsymptoticPrediction {
  Regime regime;
  double theta_hat = 0;  // kPZero
  double b_hat = 0;      // kPIn01
  double c_hat = 0;      // kPIn01
  double exp_rate = 0;   // kPOne: sqrt(2*beta)
};

// g(theta) = (theta - 1/theta) log theta - (theta + 1/theta) + 2,
// strictly increasing on [1, inf).
double g(double theta);

// Unique theta in (1, inf) with g(theta) = beta/lambda.
double solve_theta_hat(const ModelParams& params);

// Large-deviation cost per unit time of the walk moving at speed x >= 0.
double rate_function(double x, double lambda);

// d/dx of rate_function: log((sqrt(x^2+4 lambda^2)+x)/(2 lambda)).
double rate_function_derivative(double x, double lambda);

// Unique x >= 0 with rate_function(x) = y.
double rate_function_inverse(double y, double lambda);

AsymptoticPrediction classify(const ModelParams& params);

// lambda*(theta_hat - 1/theta_hat), the p = 0 speed.
double rightmost_speed(const ModelParams& params);

// Regime-appropriate predicted rightmost position at time t (p <= 1).
double predict_rightmost(const ModelParams& params, double t);

// Regime-appropriate normalization of an observed rightmost position:
// R/t, (log t / t)^b_hat * R, or log(R)/sqrt(t).
double normalize_rightmost(const ModelParams& params, double rightmost,
                           double t);

// The normalization applied to the prediction itself (the constant the
// normalized statistic converges to).
double normalized_limit(const ModelParams& params);

// Integrates f'(s) = rate_function_inverse(beta*f(s)^p) from
// (t_grid.front(), f0); returns f at the grid points.
std::vector<double> optimal_path(const ModelParams& params,
                                 std::span<const double> t_grid,
                                 double f0 = 1.0);

}  // namespace brwlab
