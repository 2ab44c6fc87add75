#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "brwlab/analytics.hpp"

namespace brwlab {

enum class Termination { kHorizon, kPopulationCap, kEventCap };

struct SimConfig {
  ModelParams params;
  double t_max = 10.0;
  std::int64_t population_cap = 1'000'000;
  std::int64_t event_cap = 100'000'000;
  std::vector<double> sample_grid;  // ascending, within [0, t_max]
  std::uint64_t seed = 1;
  int start_position = 0;
  // Instead of terminating when the cap is reached, discard the leftmost
  // particles and keep running with the rightmost population_cap particles.
  // cap_hit_time still records the first time the cap was reached.  This is
  // the only way to follow the front at horizons where the true population
  // is astronomically large.
  bool cull_leftmost = false;
};

struct PopulationTrajectory {
  std::vector<double> sample_times;
  std::vector<std::int64_t> population;
  std::vector<int> rightmost;
  std::vector<int> leftmost;
  std::optional<double> cap_hit_time;
  std::int64_t event_count = 0;
  std::int64_t branch_count = 0;
  Termination terminated_reason = Termination::kHorizon;
};

// Exact event-driven simulation under the base measure: each particle at y
// carries exponential clocks at rates (lambda, lambda, beta*|y|^p),
// resampled after each of its events; events processed in global
// (time, particle id, kind) order.  Deterministic given config.seed.
PopulationTrajectory simulate(const SimConfig& config);

struct CapHitRow {
  std::int64_t cap = 0;
  double median = 0, q1 = 0, q3 = 0;
  int completed = 0;     // replicas that reached the population cap
  int event_capped = 0;  // replicas that hit the event cap first
};

// For each cap, runs `replicas` simulations with population_cap = cap and
// aggregates the cap-hit times (the finite-resource proxy for explosion).
std::vector<CapHitRow> cap_hit_scan(const ModelParams& params,
                                    std::span<const std::int64_t> caps,
                                    int replicas, std::uint64_t seed,
                                    double t_max = 1e6,
                                    std::int64_t event_cap = 100'000'000);

// Full genealogy with per-particle jump histories, as needed by the additive
// martingale.  At a split the parent record keeps running and the children
// list holds the split-off line, an equivalent encoding of the binary tree.
struct TreeParticle {
  std::int32_t parent = -1;
  double birth_time = 0;
  int birth_position = 0;
  std::vector<double> up_times;    // own +1 jumps, after birth_time
  std::vector<double> down_times;  // own -1 jumps
  std::vector<std::int32_t> children;
  std::vector<double> child_times;  // birth time of children[i]

  int position_at(double t) const;  // absolute position, t >= birth_time
};

struct Tree {
  std::vector<TreeParticle> particles;  // particles[0] is the root
  double start_time = 0;
  double end_time = 0;  // time actually reached (== t_max unless capped)
  double t_max = 0;
  Termination terminated_reason = Termination::kHorizon;
  std::int64_t event_count = 0;

  std::int64_t population_at(double t) const;
  int rightmost_at(double t) const;
};

Tree simulate_tree(const ModelParams& params, double start_time, double t_max,
                   int start_position, std::int64_t population_cap,
                   std::int64_t event_cap, std::uint64_t seed);

struct StartComparison {
  double mean_x = 0, se_x = 0;
  double mean_y = 0, se_y = 0;
  double difference = 0;
  double combined_se = 0;
};

// Runs rightmost scans from two start positions and compares the
// regime-normalized statistic at time t.
StartComparison start_position_irrelevance_check(
    const ModelParams& params, int x, int y, double t, int replicas,
    std::uint64_t seed, std::int64_t cull_cap = 20'000);

}  // namespace brwlab
