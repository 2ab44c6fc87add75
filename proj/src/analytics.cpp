#include "brwlab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace brwlab {

ModelParams::ModelParams(double lambda_, double beta_, double p_)
    : lambda(lambda_), beta(beta_), p(p_) {
  if (!(lambda >= 0)) throw std::invalid_argument("ModelParams: lambda must be >= 0");
  if (!(beta >= 0)) throw std::invalid_argument("ModelParams: beta must be >= 0");
  if (!(p >= 0)) throw std::invalid_argument("ModelParams: p must be >= 0");
}

double g(double theta) {
  if (!(theta > 0)) throw std::domain_error("g: theta must be > 0");
  return (theta - 1.0 / theta) * std::log(theta) - (theta + 1.0 / theta) + 2.0;
}

namespace {
// g'(theta) = (1 + theta^-2) log theta
double g_prime(double theta) {
  return (1.0 + 1.0 / (theta * theta)) * std::log(theta);
}
}  // namespace

double solve_theta_hat(const ModelParams& params) {
  if (!(params.lambda > 0))
    throw std::domain_error("solve_theta_hat: lambda must be > 0");
  const double target = params.beta / params.lambda;
  double lo = 1.0, hi = 2.0;
  while (g(hi) < target) {
    lo = hi;
    hi *= 2.0;
  }
  // bisection on a monotone function, then a few Newton polish steps
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < target ? lo : hi) = mid;
  }
  double theta = 0.5 * (lo + hi);
  for (int i = 0; i < 4; ++i) {
    const double gp = g_prime(theta);
    if (gp <= 0) break;
    const double next = theta - (g(theta) - target) / gp;
    if (next > lo && next < hi) theta = next;
  }
  return theta;
}

double rate_function(double x, double lambda) {
  if (!(x >= 0)) throw std::domain_error("rate_function: x must be >= 0");
  if (!(lambda > 0)) throw std::domain_error("rate_function: lambda must be > 0");
  // with u = x/(2 lambda): Lambda = x asinh(u) - 2 lambda u^2/(1 + sqrt(1+u^2)),
  // stable down to x = 0 where the log form cancels catastrophically
  const double u = x / (2.0 * lambda);
  const double root = std::sqrt(1.0 + u * u);
  return x * std::asinh(u) - 2.0 * lambda * u * u / (1.0 + root);
}

double rate_function_derivative(double x, double lambda) {
  return std::asinh(x / (2.0 * lambda));
}

double rate_function_inverse(double y, double lambda) {
  if (!(y >= 0)) throw std::domain_error("rate_function_inverse: y must be >= 0");
  if (y == 0) return 0.0;

  // bracket [lo, hi] with Lambda(hi) >= y
  double lo = 0.0, hi = std::max(1.0, 4.0 * std::sqrt(lambda * y));
  while (rate_function(hi, lambda) < y) {
    lo = hi;
    hi *= 2.0;
  }
  // quadratic zone guess 2*sqrt(lambda*y), x log x zone guess y/log y
  double x = (y > 2.0 * lambda)
                 ? std::min(hi, std::max(lo, y / std::max(1.0, std::log(y))))
                 : std::min(hi, 2.0 * std::sqrt(lambda * y));
  const double tol = 1e-13 * y;
  for (int i = 0; i < 100; ++i) {
    const double f = rate_function(x, lambda) - y;
    if (std::abs(f) <= tol) return x;
    (f < 0 ? lo : hi) = x;
    const double d = rate_function_derivative(x, lambda);
    double next = (d > 0) ? x - f / d : x;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

AsymptoticPrediction classify(const ModelParams& params) {
  AsymptoticPrediction out{};
  if (params.p == 0) {
    out.regime = Regime::kPZero;
    out.theta_hat = solve_theta_hat(params);
  } else if (params.p < 1) {
    out.regime = Regime::kPIn01;
    out.b_hat = 1.0 / (1.0 - params.p);
    out.c_hat = std::pow(
        params.beta * (1.0 - params.p) * (1.0 - params.p) / params.p, out.b_hat);
  } else if (params.p == 1) {
    out.regime = Regime::kPOne;
    out.exp_rate = std::sqrt(2.0 * params.beta);
  } else {
    out.regime = Regime::kExplosive;
  }
  return out;
}

double rightmost_speed(const ModelParams& params) {
  const double th = solve_theta_hat(params);
  return params.lambda * (th - 1.0 / th);
}

double predict_rightmost(const ModelParams& params, double t) {
  if (params.p > 1)
    throw std::domain_error("predict_rightmost: no finite prediction for p > 1");
  if (!(t > 0)) throw std::domain_error("predict_rightmost: t must be > 0");
  const auto pred = classify(params);
  switch (pred.regime) {
    case Regime::kPZero:
      return params.lambda * (pred.theta_hat - 1.0 / pred.theta_hat) * t;
    case Regime::kPIn01:
      if (!(std::log(t) > 1))
        throw std::domain_error("predict_rightmost: need t > e for p in (0,1)");
      return pred.c_hat * std::pow(t / std::log(t), pred.b_hat);
    default:
      return std::exp(pred.exp_rate * std::sqrt(t));
  }
}

double normalize_rightmost(const ModelParams& params, double rightmost,
                           double t) {
  if (params.p > 1)
    throw std::domain_error("normalize_rightmost: unsupported for p > 1");
  if (params.p == 0) return rightmost / t;
  if (params.p < 1) {
    const double b_hat = 1.0 / (1.0 - params.p);
    return std::pow(std::log(t) / t, b_hat) * rightmost;
  }
  return std::log(std::max(rightmost, 1.0)) / std::sqrt(t);
}

double normalized_limit(const ModelParams& params) {
  const auto pred = classify(params);
  switch (pred.regime) {
    case Regime::kPZero:
      return params.lambda * (pred.theta_hat - 1.0 / pred.theta_hat);
    case Regime::kPIn01:
      return pred.c_hat;
    case Regime::kPOne:
      return pred.exp_rate;
    default:
      throw std::domain_error("normalized_limit: unsupported for p > 1");
  }
}

std::vector<double> optimal_path(const ModelParams& params,
                                 std::span<const double> t_grid, double f0) {
  if (params.p > 1)
    throw std::domain_error("optimal_path: unsupported for p > 1");
  if (t_grid.empty()) return {};
  if (!(t_grid.front() > 0))
    throw std::domain_error("optimal_path: t_grid must start > 0");
  if (!(f0 > 0)) throw std::domain_error("optimal_path: f0 must be > 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::domain_error("optimal_path: t_grid must be ascending");

  const auto slope = [&](double f) {
    return rate_function_inverse(params.beta * std::pow(f, params.p),
                                 params.lambda);
  };
  const auto rk4 = [&](double f, double h) {
    const double k1 = slope(f);
    const double k2 = slope(f + 0.5 * h * k1);
    const double k3 = slope(f + 0.5 * h * k2);
    const double k4 = slope(f + h * k3);
    return f + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  constexpr double kAbsTolPerUnitTime = 1e-8;
  std::vector<double> out;
  out.reserve(t_grid.size());
  double t = t_grid.front();
  double f = f0;
  out.push_back(f);
  double h = 0.1;
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double t_end = t_grid[i];
    while (t < t_end) {
      const double step = std::min(h, t_end - t);
      const double full = rk4(f, step);
      const double half = rk4(rk4(f, 0.5 * step), 0.5 * step);
      const double err = std::abs(half - full) / 15.0;
      const double tol = kAbsTolPerUnitTime * step * std::max(1.0, f);
      if (err <= tol) {
        f = half + (half - full) / 15.0;
        t += step;
        if (err < 0.1 * tol) h = std::min(2.0 * h, 4.0 * (t_end - t_grid.front() + 1.0));
      } else {
        h = std::max(1e-12, 0.5 * step);
      }
    }
    out.push_back(f);
  }
  return out;
}

}  // namespace brwlab
