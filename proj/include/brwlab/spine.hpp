#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "brwlab/analytics.hpp"
#include "brwlab/poisson.hpp"
#include "brwlab/simulator.hpp"

namespace brwlab {

// Joint tilt theta = (theta_plus, theta_minus).  The spine jumps up at rate
// lambda*theta_plus(s) and down at rate lambda*theta_minus(s).
struct ThetaSchedule {
  RateFunctionSpec up;
  RateFunctionSpec down;
  double horizon;  // domain end of the schedule

  static ThetaSchedule identity();
  // theta_plus = theta0, theta_minus = 1/theta0
  static ThetaSchedule case_a(double theta0);
  // theta_plus(s) = c/(lambda(1-p)) s^(b-1)/log(s+2)^b, theta_minus = 1
  static ThetaSchedule case_b(double c, const ModelParams& params);
  // theta_plus(s) = exp(alpha sqrt(s)), theta_minus = 1
  static ThetaSchedule case_c(double alpha);
  // theta_plus(s) = (T-s)^-c, theta_minus = 1; drives the spine to infinity
  // before time T
  static ThetaSchedule explosion(double T, double c);
  // variants with theta_minus = 1/theta_plus, as used in the upper bounds
  static ThetaSchedule case_b_upper(double c, const ModelParams& params);
  static ThetaSchedule case_c_upper(double alpha);
};

struct SpineRecord {
  JumpPath up_jumps;
  JumpPath down_jumps;
  std::vector<double> birth_times;  // fission times S_n, strictly ascending
  int start_position = 0;
  double horizon = 0;

  int position_at(double t) const;
  std::int64_t births_at(double t) const;
  // int_0^t beta*|xi_s|^p ds over the piecewise-constant spine path
  double breeding_integral(const ModelParams& params, double t) const;
};

// Spine path under the tilted measure: up/down jumps are inhomogeneous
// Poisson at rates lambda*theta_plus, lambda*theta_minus; births form a Cox
// process at rate 2*beta*|xi_t|^p given the path, sampled by exact
// time-change over the constancy intervals.
SpineRecord sample_spine(const ModelParams& params, const ThetaSchedule& theta,
                         double t_max, std::uint64_t seed,
                         int start_position = 0);

// Number of spine births up to t without storing them, for horizons where
// the count is too large to enumerate: streams the spine jumps to get the
// exact Cox intensity B(t) = int_0^t 2*beta*|xi_s|^p ds, then draws the
// conditionally Poisson(B) count.
struct SpineBirthCount {
  double intensity = 0;
  std::int64_t count = 0;
};
SpineBirthCount spine_birth_count(const ModelParams& params,
                                  const ThetaSchedule& theta, double t,
                                  std::uint64_t seed, int start_position = 0);

// 2*beta*(lambda/(c-1))^p (T-t)^(-p(c-1)+1) / (p(c-1)-1), the growth of the
// birth count under the explosion tilt as t approaches T.
double explosion_birth_count_asymptotic(const ModelParams& params, double T,
                                        double c, double t);

// The tilted tree: the spine plus one unbiased subtree per fission, each
// rooted at the spine's position at the fission time.
struct TiltedTree {
  SpineRecord spine;
  std::vector<Tree> subtrees;  // subtrees[n] starts at spine.birth_times[n]
  double t_max = 0;
  // Time up to which the tree is complete.  Equals t_max unless a subtree
  // hit a cap; subtrees exist for every birth at or before end_time.
  double end_time = 0;
  Termination terminated_reason = Termination::kHorizon;
  std::int64_t event_count = 0;

  std::int64_t population_at(double t) const;  // spine included
  int rightmost_at(double t) const;
};

TiltedTree simulate_tilted(const ModelParams& params,
                           const ThetaSchedule& theta, double t_max,
                           std::int64_t population_cap, std::int64_t event_cap,
                           std::uint64_t seed);

// Same spine, fresh subtrees; the conditional resampling used by the
// decomposition oracle.
TiltedTree resample_subtrees(const TiltedTree& tree, const ModelParams& params,
                             std::int64_t population_cap,
                             std::int64_t event_cap, std::uint64_t seed);

// M_theta(t) = sum over particles alive at t of
// exp(int log theta_plus dX_u+ + int log theta_minus dX_u-
//     + lambda int_0^t (2 - theta_plus - theta_minus) - beta int |X_u|^p),
// with ancestral histories inherited and the path integral exact.  Per
// particle exponents are kept in log space and combined with a max shift.
double additive_martingale(const Tree& tree, const ThetaSchedule& theta,
                           const ModelParams& params, double t);
double additive_martingale(const TiltedTree& tree, const ThetaSchedule& theta,
                           const ModelParams& params, double t);

// spine_term = the spine particle's own martingale contribution at t;
// sum_term = sum over fissions S_n <= t of the spine_term evaluated at S_n.
// Their sum is the conditional expectation of M_theta(t) given the spine.
struct SpineDecomposition {
  double spine_term = 0;
  double sum_term = 0;
};
SpineDecomposition spine_decomposition(const SpineRecord& spine,
                                       const ThetaSchedule& theta,
                                       const ModelParams& params, double t);

// Per-replica sup of M_theta over the grid under the tilted measure, plus
// the first/last grid values for divergence checks.
struct RegimeScan {
  std::vector<double> sup;
  std::vector<double> first;
  std::vector<double> last;
  int truncated = 0;  // replicas whose tree was capped before the last point
};
RegimeScan regime_sup_statistic(const ModelParams& params,
                                const ThetaSchedule& theta,
                                std::span<const double> t_grid, int replicas,
                                std::uint64_t seed,
                                std::int64_t population_cap = 2'000'000,
                                std::int64_t event_cap = 100'000'000);

}  // namespace brwlab
