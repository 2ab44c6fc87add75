#pragma once

#include <cstdint>
#include <functional>

#include "brwlab/analytics.hpp"

namespace brwlab {

struct WeightedPathEstimate {
  double mean = 0;
  double standard_error = 0;
  int replicas = 0;
  double max_weight = 0;
  std::int64_t hits = 0;  // replicas contributing a positive weight
};

// E|N_t| as the single-walk Feynman-Kac average E[exp(int_0^t beta*|X_s|^p)],
// with the path integral computed exactly over the piecewise-constant path.
// For p > 1 the expectation is infinite for every t > 0 and the call refuses.
WeightedPathEstimate expected_population(const ModelParams& params, double t,
                                         int replicas, std::uint64_t seed);

// Expected number of particles staying within delta of f on [0, t]:
// MC mean of 1{|X_s - f(s)| <= delta for all s} * exp(int beta*|X_s|^p).
// The corridor is checked at both endpoints of every constancy interval,
// exact for monotone f.  Shares per-replica walks with expected_population
// at equal seeds, so the indicator bound holds replica-wise.
WeightedPathEstimate corridor_expectation(
    const ModelParams& params, const std::function<double(double)>& f,
    double delta, double t, int replicas, std::uint64_t seed);

}  // namespace brwlab
