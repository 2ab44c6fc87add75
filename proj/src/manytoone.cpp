#include "brwlab/manytoone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "brwlab/rng.hpp"
#include "brwlab/stats.hpp"

namespace brwlab {

namespace {

double pow_abs(int pos, double p) {
  if (p == 0.0) return 1.0;
  const double a = std::abs(static_cast<double>(pos));
  if (a == 0.0) return 0.0;
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  if (p == 0.5) return std::sqrt(a);
  return std::pow(a, p);
}

WeightedPathEstimate weighted_walk_average(
    const ModelParams& params, double t, int replicas, std::uint64_t seed,
    const std::function<double(double)>* f, double delta) {
  if (!(t > 0)) throw std::domain_error("many-to-one: t must be > 0");
  if (replicas < 1) throw std::invalid_argument("many-to-one: replicas must be >= 1");
  const Rng root(seed);
  std::vector<double> weights;
  weights.reserve(replicas);
  WeightedPathEstimate out;
  out.replicas = replicas;
  for (int i = 0; i < replicas; ++i) {
    Rng rng = root.split(i);
    double a = 0.0, integral = 0.0;
    int pos = 0;
    bool inside = f == nullptr || std::abs(pos - (*f)(0.0)) <= delta;
    for (;;) {
      const double jump = a + rng.exponential(2.0 * params.lambda);
      const double b = std::min(jump, t);
      integral += params.beta * pow_abs(pos, params.p) * (b - a);
      if (inside && f != nullptr)
        inside = std::abs(pos - (*f)(a)) <= delta &&
                 std::abs(pos - (*f)(b)) <= delta;
      if (jump >= t) break;
      pos += rng.uniform() <= 0.5 ? 1 : -1;
      a = b;
    }
    const double w = inside ? std::exp(integral) : 0.0;
    if (w > 0) ++out.hits;
    out.max_weight = std::max(out.max_weight, w);
    weights.push_back(w);
  }
  const auto [mean, se] = mean_and_se(weights);
  out.mean = mean;
  out.standard_error = se;
  return out;
}

}  // namespace

WeightedPathEstimate expected_population(const ModelParams& params, double t,
                                         int replicas, std::uint64_t seed) {
  if (params.p > 1)
    throw std::domain_error(
        "expected_population: E|N_t| is infinite for all t > 0 when p > 1");
  return weighted_walk_average(params, t, replicas, seed, nullptr, 0.0);
}

WeightedPathEstimate corridor_expectation(
    const ModelParams& params, const std::function<double(double)>& f,
    double delta, double t, int replicas, std::uint64_t seed) {
  if (!(delta > 0))
    throw std::domain_error("corridor_expectation: delta must be > 0");
  return weighted_walk_average(params, t, replicas, seed, &f, delta);
}

}  // namespace brwlab
