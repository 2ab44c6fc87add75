#include "brwlab/spine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "brwlab/rng.hpp"
#include "brwlab/stats.hpp"

namespace brwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pow_abs(int pos, double p) {
  if (p == 0.0) return 1.0;
  const double a = std::abs(static_cast<double>(pos));
  if (a == 0.0) return 0.0;
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  if (p == 0.5) return std::sqrt(a);
  return std::pow(a, p);
}

}  // namespace

ThetaSchedule ThetaSchedule::identity() {
  return {RateFunctionSpec::constant(1.0), RateFunctionSpec::constant(1.0), kInf};
}

ThetaSchedule ThetaSchedule::case_a(double theta0) {
  if (!(theta0 > 0)) throw std::invalid_argument("ThetaSchedule: theta0 must be > 0");
  return {RateFunctionSpec::constant(theta0),
          RateFunctionSpec::constant(1.0 / theta0), kInf};
}

ThetaSchedule ThetaSchedule::case_b(double c, const ModelParams& params) {
  return {RateFunctionSpec::case_b(c, params.lambda, params.p),
          RateFunctionSpec::constant(1.0), kInf};
}

ThetaSchedule ThetaSchedule::case_c(double alpha) {
  return {RateFunctionSpec::case_c(alpha), RateFunctionSpec::constant(1.0), kInf};
}

ThetaSchedule ThetaSchedule::explosion(double T, double c) {
  return {RateFunctionSpec::power_singular(T, c), RateFunctionSpec::constant(1.0),
          T};
}

ThetaSchedule ThetaSchedule::case_b_upper(double c, const ModelParams& params) {
  // 1/theta_plus ~ s^(1-b_hat) near 0, integrable only when b_hat < 2
  if (!(params.p < 0.5))
    throw std::invalid_argument(
        "ThetaSchedule: case_b_upper needs p < 1/2 for an integrable down rate");
  const auto up = RateFunctionSpec::case_b(c, params.lambda, params.p);
  return {up, RateFunctionSpec::reciprocal(up), kInf};
}

ThetaSchedule ThetaSchedule::case_c_upper(double alpha) {
  const auto up = RateFunctionSpec::case_c(alpha);
  return {up, RateFunctionSpec::reciprocal(up), kInf};
}

int SpineRecord::position_at(double t) const {
  return start_position + static_cast<int>(up_jumps.count_at(t)) -
         static_cast<int>(down_jumps.count_at(t));
}

std::int64_t SpineRecord::births_at(double t) const {
  return std::upper_bound(birth_times.begin(), birth_times.end(), t) -
         birth_times.begin();
}

double SpineRecord::breeding_integral(const ModelParams& params, double t) const {
  const auto& up = up_jumps.jump_times;
  const auto& down = down_jumps.jump_times;
  std::size_t iu = 0, id = 0;
  double a = 0.0, acc = 0.0;
  int pos = start_position;
  for (;;) {
    const double tu = iu < up.size() ? up[iu] : kInf;
    const double td = id < down.size() ? down[id] : kInf;
    const double nxt = std::min({tu, td, t});
    acc += params.beta * pow_abs(pos, params.p) * (nxt - a);
    a = nxt;
    if (tu <= td && tu <= t) {
      ++pos;
      ++iu;
    } else if (td <= t) {
      --pos;
      ++id;
    } else {
      break;
    }
  }
  return acc;
}

SpineRecord sample_spine(const ModelParams& params, const ThetaSchedule& theta,
                         double t_max, std::uint64_t seed, int start_position) {
  if (!(t_max >= 0) || !(t_max < theta.horizon))
    throw std::domain_error("sample_spine: t_max must lie in [0, horizon)");
  const Rng root(seed);
  SpineRecord rec;
  rec.start_position = start_position;
  rec.horizon = t_max;
  rec.up_jumps = sample_inhomogeneous_poisson(theta.up, t_max,
                                              root.split(1).key(), params.lambda);
  rec.down_jumps = sample_inhomogeneous_poisson(
      theta.down, t_max, root.split(2).key(), params.lambda);

  // Cox births: exact time-change over the constancy intervals of xi
  Rng brng = root.split(3);
  const auto& up = rec.up_jumps.jump_times;
  const auto& down = rec.down_jumps.jump_times;
  std::size_t iu = 0, id = 0;
  double a = 0.0;
  int pos = start_position;
  double remaining = brng.exponential(1.0);
  for (;;) {
    const double tu = iu < up.size() ? up[iu] : kInf;
    const double td = id < down.size() ? down[id] : kInf;
    const double seg_end = std::min({tu, td, t_max});
    const double rate = 2.0 * params.beta * pow_abs(pos, params.p);
    if (rate > 0) {
      while (remaining <= rate * (seg_end - a)) {
        a += remaining / rate;
        rec.birth_times.push_back(a);
        remaining = brng.exponential(1.0);
      }
      remaining -= rate * (seg_end - a);
    }
    a = seg_end;
    if (tu <= td && tu <= t_max) {
      ++pos;
      ++iu;
    } else if (td <= t_max) {
      --pos;
      ++id;
    } else {
      break;
    }
  }
  return rec;
}

namespace {

// Pull-based jump sampler matching for_each_jump, for merging two streams
// without materializing them.
class JumpStream {
 public:
  JumpStream(const RateFunctionSpec& spec, double scale, std::uint64_t seed)
      : spec_(spec), scale_(scale), rng_(seed) {}

  double next() {
    if (scale_ <= 0) return kInf;
    s_ += rng_.exponential(scale_);
    if (spec_.kind() == RateFunctionSpec::Kind::kPowerSingular &&
        spec_.param_b() == 2.0) {
      const double T = spec_.param_a();
      return T - 1.0 / (1.0 / T + s_);
    }
    return inverse_cumulative_rate(spec_, s_);
  }

 private:
  const RateFunctionSpec& spec_;
  double scale_;
  Rng rng_;
  double s_ = 0;
};

}  // namespace

SpineBirthCount spine_birth_count(const ModelParams& params,
                                  const ThetaSchedule& theta, double t,
                                  std::uint64_t seed, int start_position) {
  if (!(t >= 0) || !(t < theta.horizon))
    throw std::domain_error("spine_birth_count: t must lie in [0, horizon)");
  const Rng root(seed);
  JumpStream up(theta.up, params.lambda, root.split(1).key());
  JumpStream down(theta.down, params.lambda, root.split(2).key());
  double tu = up.next(), td = down.next();
  double a = 0.0, intensity = 0.0;
  int pos = start_position;
  for (;;) {
    const double nxt = std::min({tu, td, t});
    intensity += 2.0 * params.beta * pow_abs(pos, params.p) * (nxt - a);
    a = nxt;
    if (tu <= td && tu <= t) {
      ++pos;
      tu = up.next();
    } else if (td <= t) {
      --pos;
      td = down.next();
    } else {
      break;
    }
  }
  SpineBirthCount out;
  out.intensity = intensity;
  Rng brng = root.split(3);
  std::poisson_distribution<std::int64_t> pois(intensity);
  out.count = intensity > 0 ? pois(brng) : 0;
  return out;
}

double explosion_birth_count_asymptotic(const ModelParams& params, double T,
                                        double c, double t) {
  if (!(params.p * (c - 1.0) > 1.0))
    throw std::domain_error(
        "explosion_birth_count_asymptotic: need p*(c-1) > 1");
  if (!(t >= 0) || !(t < T))
    throw std::domain_error("explosion_birth_count_asymptotic: t must lie in [0, T)");
  const double q = params.p * (c - 1.0);
  return 2.0 * params.beta * std::pow(params.lambda / (c - 1.0), params.p) *
         std::pow(T - t, 1.0 - q) / (q - 1.0);
}

namespace {

void attach_subtrees(TiltedTree& tree, const ModelParams& params,
                     std::int64_t population_cap, std::int64_t event_cap,
                     const Rng& sub_root) {
  tree.subtrees.clear();
  tree.end_time = tree.t_max;
  tree.terminated_reason = Termination::kHorizon;
  tree.event_count = static_cast<std::int64_t>(
      tree.spine.up_jumps.jump_times.size() +
      tree.spine.down_jumps.jump_times.size() + tree.spine.birth_times.size());
  std::int64_t budget = population_cap;
  for (std::size_t n = 0; n < tree.spine.birth_times.size(); ++n) {
    const double born = tree.spine.birth_times[n];
    if (born > tree.end_time) break;
    Tree sub = simulate_tree(params, born, tree.t_max,
                             tree.spine.position_at(born),
                             std::max<std::int64_t>(budget, 1), event_cap,
                             sub_root.split(n).key());
    tree.event_count += sub.event_count;
    budget -= static_cast<std::int64_t>(sub.particles.size());
    if (sub.terminated_reason != Termination::kHorizon) {
      tree.terminated_reason = sub.terminated_reason;
      tree.end_time = std::min(tree.end_time, sub.end_time);
    } else if (budget <= 0) {
      tree.terminated_reason = Termination::kPopulationCap;
      tree.end_time = std::min(tree.end_time, sub.end_time);
    }
    tree.subtrees.push_back(std::move(sub));
  }
}

}  // namespace

TiltedTree simulate_tilted(const ModelParams& params,
                           const ThetaSchedule& theta, double t_max,
                           std::int64_t population_cap, std::int64_t event_cap,
                           std::uint64_t seed) {
  const Rng root(seed);
  TiltedTree tree;
  tree.t_max = t_max;
  tree.spine = sample_spine(params, theta, t_max, root.split(1).key());
  attach_subtrees(tree, params, population_cap, event_cap, root.split(2));
  return tree;
}

TiltedTree resample_subtrees(const TiltedTree& tree, const ModelParams& params,
                             std::int64_t population_cap,
                             std::int64_t event_cap, std::uint64_t seed) {
  TiltedTree fresh;
  fresh.t_max = tree.t_max;
  fresh.spine = tree.spine;
  attach_subtrees(fresh, params, population_cap, event_cap, Rng(seed));
  return fresh;
}

std::int64_t TiltedTree::population_at(double t) const {
  std::int64_t total = 1;
  for (const auto& sub : subtrees) {
    if (sub.start_time > t) break;
    total += sub.population_at(t);
  }
  return total;
}

int TiltedTree::rightmost_at(double t) const {
  int best = spine.position_at(t);
  for (const auto& sub : subtrees) {
    if (sub.start_time > t) break;
    best = std::max(best, sub.rightmost_at(t));
  }
  return best;
}

namespace {

// Per-particle log contributions (jump factors minus the breeding integral)
// over [birth, t], seeded with the inherited ancestral prefix.  The shared
// lambda*int(2 - theta_plus - theta_minus) term is added by the caller.
void tree_log_weights(const Tree& tree, const ThetaSchedule& theta,
                      const ModelParams& params, double t, double init_log,
                      std::vector<double>& out) {
  std::vector<double> inherited(tree.particles.size(), 0.0);
  if (!tree.particles.empty()) inherited[0] = init_log;
  for (std::size_t i = 0; i < tree.particles.size(); ++i) {
    const auto& q = tree.particles[i];
    if (q.birth_time > t) continue;
    double lw = inherited[i];
    double a = q.birth_time;
    int pos = q.birth_position;
    std::size_t iu = 0, id = 0, ic = 0;
    for (;;) {
      const double tu = iu < q.up_times.size() ? q.up_times[iu] : kInf;
      const double td = id < q.down_times.size() ? q.down_times[id] : kInf;
      const double tc = ic < q.child_times.size() ? q.child_times[ic] : kInf;
      const double nxt = std::min({tu, td, tc, t});
      lw -= params.beta * pow_abs(pos, params.p) * (nxt - a);
      a = nxt;
      if (tc <= tu && tc <= td && tc <= t) {
        inherited[q.children[ic]] = lw;
        ++ic;
      } else if (tu <= td && tu <= t) {
        lw += std::log(theta.up.rate(tu));
        ++pos;
        ++iu;
      } else if (td <= t) {
        lw += std::log(theta.down.rate(td));
        --pos;
        ++id;
      } else {
        break;
      }
    }
    out.push_back(lw);
  }
}

// Spine log contribution at t plus the snapshots at each fission <= t.
double spine_log_weight(const SpineRecord& spine, const ThetaSchedule& theta,
                        const ModelParams& params, double t,
                        std::vector<double>* snapshots) {
  const auto& up = spine.up_jumps.jump_times;
  const auto& down = spine.down_jumps.jump_times;
  const auto& births = spine.birth_times;
  std::size_t iu = 0, id = 0, ib = 0;
  double a = 0.0, lw = 0.0;
  int pos = spine.start_position;
  for (;;) {
    const double tu = iu < up.size() ? up[iu] : kInf;
    const double td = id < down.size() ? down[id] : kInf;
    const double tb = ib < births.size() ? births[ib] : kInf;
    const double nxt = std::min({tu, td, tb, t});
    lw -= params.beta * pow_abs(pos, params.p) * (nxt - a);
    a = nxt;
    if (tb <= tu && tb <= td && tb <= t) {
      if (snapshots) snapshots->push_back(lw);
      ++ib;
    } else if (tu <= td && tu <= t) {
      lw += std::log(theta.up.rate(tu));
      ++pos;
      ++iu;
    } else if (td <= t) {
      lw += std::log(theta.down.rate(td));
      --pos;
      ++id;
    } else {
      break;
    }
  }
  return lw;
}

double lambda_compensator(const ThetaSchedule& theta, const ModelParams& params,
                          double t) {
  return params.lambda *
         (2.0 * t - cumulative_rate(theta.up, t) - cumulative_rate(theta.down, t));
}

}  // namespace

double additive_martingale(const Tree& tree, const ThetaSchedule& theta,
                           const ModelParams& params, double t) {
  if (tree.start_time != 0)
    throw std::domain_error("additive_martingale: tree must start at time 0");
  if (!(t >= 0) || t > tree.end_time)
    throw std::domain_error("additive_martingale: t outside the recorded range");
  std::vector<double> logs;
  tree_log_weights(tree, theta, params, t, 0.0, logs);
  return std::exp(log_sum_exp(logs) + lambda_compensator(theta, params, t));
}

double additive_martingale(const TiltedTree& tree, const ThetaSchedule& theta,
                           const ModelParams& params, double t) {
  if (!(t >= 0) || t > tree.end_time)
    throw std::domain_error("additive_martingale: t outside the recorded range");
  std::vector<double> snapshots;
  std::vector<double> logs;
  logs.push_back(spine_log_weight(tree.spine, theta, params, t, &snapshots));
  for (std::size_t n = 0; n < snapshots.size(); ++n)
    tree_log_weights(tree.subtrees[n], theta, params, t, snapshots[n], logs);
  return std::exp(log_sum_exp(logs) + lambda_compensator(theta, params, t));
}

SpineDecomposition spine_decomposition(const SpineRecord& spine,
                                       const ThetaSchedule& theta,
                                       const ModelParams& params, double t) {
  if (!(t >= 0) || !(t <= spine.horizon))
    throw std::domain_error("spine_decomposition: t outside the recorded range");
  std::vector<double> snapshots;
  const double lw = spine_log_weight(spine, theta, params, t, &snapshots);
  SpineDecomposition out;
  out.spine_term = std::exp(lw + lambda_compensator(theta, params, t));
  std::vector<double> logs;
  logs.reserve(snapshots.size());
  for (std::size_t n = 0; n < snapshots.size(); ++n)
    logs.push_back(snapshots[n] +
                   lambda_compensator(theta, params, spine.birth_times[n]));
  out.sum_term = logs.empty() ? 0.0 : std::exp(log_sum_exp(logs));
  return out;
}

RegimeScan regime_sup_statistic(const ModelParams& params,
                                const ThetaSchedule& theta,
                                std::span<const double> t_grid, int replicas,
                                std::uint64_t seed,
                                std::int64_t population_cap,
                                std::int64_t event_cap) {
  if (t_grid.empty())
    throw std::invalid_argument("regime_sup_statistic: t_grid must be nonempty");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("regime_sup_statistic: t_grid must be ascending");
  if (replicas < 1)
    throw std::invalid_argument("regime_sup_statistic: replicas must be >= 1");

  const Rng root(seed);
  RegimeScan out;
  out.sup.reserve(replicas);
  for (int r = 0; r < replicas; ++r) {
    const auto tree = simulate_tilted(params, theta, t_grid.back(),
                                      population_cap, event_cap,
                                      root.split(r).key());
    double sup = 0.0, first = 0.0, last = 0.0;
    bool any = false;
    for (double u : t_grid) {
      if (u > tree.end_time) break;
      const double m = additive_martingale(tree, theta, params, u);
      if (!any) first = m;
      any = true;
      last = m;
      sup = std::max(sup, m);
    }
    if (tree.end_time < t_grid.back()) ++out.truncated;
    out.sup.push_back(sup);
    out.first.push_back(first);
    out.last.push_back(last);
  }
  return out;
}

}  // namespace brwlab
