#include "brwlab/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "brwlab/rng.hpp"
#include "brwlab/stats.hpp"

namespace brwlab {

namespace {

struct BranchRate {
  double beta, p;

  double operator()(int pos) const {
    if (p == 0.0) return beta;
    const double a = std::abs(static_cast<double>(pos));
    if (a == 0.0) return 0.0;
    if (p == 1.0) return beta * a;
    if (p == 2.0) return beta * a * a;
    if (p == 0.5) return beta * std::sqrt(a);
    return beta * std::pow(a, p);
  }
};

// Occupation counts per lattice site, for O(1) rightmost/leftmost reads.
class Histogram {
 public:
  void add(int pos) {
    if (total_ == 0) {
      counts_.assign(1, 0);
      offset_ = pos;
      min_pos_ = max_pos_ = pos;
    } else if (pos < offset_) {
      const auto pad = std::max<std::size_t>(64, counts_.size());
      counts_.insert(counts_.begin(), pad, 0);
      offset_ -= static_cast<int>(pad);
    } else if (pos - offset_ >= static_cast<int>(counts_.size())) {
      counts_.resize(std::max<std::size_t>(pos - offset_ + 1, 2 * counts_.size()));
    }
    ++counts_[pos - offset_];
    ++total_;
    min_pos_ = std::min(min_pos_, pos);
    max_pos_ = std::max(max_pos_, pos);
  }

  void remove(int pos) {
    --counts_[pos - offset_];
    --total_;
    if (total_ == 0) return;
    while (counts_[max_pos_ - offset_] == 0) --max_pos_;
    while (counts_[min_pos_ - offset_] == 0) ++min_pos_;
  }

  std::int64_t total() const { return total_; }
  int min_pos() const { return min_pos_; }
  int max_pos() const { return max_pos_; }

 private:
  std::vector<std::int64_t> counts_;
  int offset_ = 0;
  int min_pos_ = 0, max_pos_ = 0;
  std::int64_t total_ = 0;
};

enum : std::uint8_t { kUp = 0, kDown = 1, kBranch = 2 };

struct Event {
  double time;
  std::uint64_t pid;
  std::uint32_t slot;
  std::uint32_t gen;
  std::uint8_t kind;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.pid > b.pid;
  }
};

void check_config(const SimConfig& config) {
  if (!(config.t_max >= 0)) throw std::invalid_argument("simulate: t_max must be >= 0");
  if (config.population_cap < 1)
    throw std::invalid_argument("simulate: population_cap must be >= 1");
  if (config.event_cap < 1)
    throw std::invalid_argument("simulate: event_cap must be >= 1");
  for (std::size_t i = 0; i < config.sample_grid.size(); ++i) {
    const double t = config.sample_grid[i];
    if (!(t >= 0) || !(t <= config.t_max))
      throw std::invalid_argument("simulate: sample_grid outside [0, t_max]");
    if (i > 0 && !(t > config.sample_grid[i - 1]))
      throw std::invalid_argument("simulate: sample_grid must be ascending");
  }
}

}  // namespace

PopulationTrajectory simulate(const SimConfig& config) {
  check_config(config);
  const BranchRate branch{config.params.beta, config.params.p};
  const double lambda = config.params.lambda;

  struct Slot {
    int pos;
    std::uint32_t gen;
    bool alive;
    std::uint64_t pid;
    Rng rng{0};
  };
  std::vector<Slot> slots;
  std::vector<std::uint32_t> free_slots;
  Histogram hist;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue;
  const Rng root(config.seed);
  std::uint64_t next_pid = 0;

  auto schedule = [&](std::uint32_t s, double now) {
    Slot& sl = slots[s];
    const double w = 2.0 * lambda + branch(sl.pos);
    if (!(w > 0)) return;
    const double dt = sl.rng.exponential(w);
    const double r = sl.rng.uniform() * w;
    const std::uint8_t kind = r < lambda ? kUp : (r < 2.0 * lambda ? kDown : kBranch);
    queue.push({now + dt, sl.pid, s, sl.gen, kind});
  };

  auto spawn = [&](int pos, double now) {
    std::uint32_t s;
    if (!free_slots.empty()) {
      s = free_slots.back();
      free_slots.pop_back();
    } else {
      s = static_cast<std::uint32_t>(slots.size());
      slots.push_back(Slot{0, 0, false, 0});
    }
    Slot& sl = slots[s];
    sl.pos = pos;
    sl.alive = true;
    sl.pid = next_pid;
    sl.rng = root.split(next_pid);
    ++next_pid;
    hist.add(pos);
    schedule(s, now);
  };

  auto kill = [&](std::uint32_t s) {
    Slot& sl = slots[s];
    sl.alive = false;
    ++sl.gen;
    hist.remove(sl.pos);
    free_slots.push_back(s);
  };

  PopulationTrajectory out;
  std::size_t gidx = 0;
  auto emit = [&](double t) {
    out.sample_times.push_back(t);
    out.population.push_back(hist.total());
    out.rightmost.push_back(hist.max_pos());
    out.leftmost.push_back(hist.min_pos());
  };

  spawn(config.start_position, 0.0);
  bool ran_to_horizon = true;

  while (!queue.empty()) {
    const Event ev = queue.top();
    if (ev.time > config.t_max) break;
    queue.pop();
    Slot& sl = slots[ev.slot];
    if (!sl.alive || sl.gen != ev.gen) continue;

    while (gidx < config.sample_grid.size() && config.sample_grid[gidx] < ev.time)
      emit(config.sample_grid[gidx++]);

    if (out.event_count >= config.event_cap) {
      out.terminated_reason = Termination::kEventCap;
      ran_to_horizon = false;
      break;
    }
    ++out.event_count;

    switch (ev.kind) {
      case kUp:
      case kDown: {
        hist.remove(sl.pos);
        sl.pos += ev.kind == kUp ? 1 : -1;
        hist.add(sl.pos);
        schedule(ev.slot, ev.time);
        break;
      }
      case kBranch: {
        ++out.branch_count;
        schedule(ev.slot, ev.time);
        spawn(sl.pos, ev.time);
        if (hist.total() >= config.population_cap) {
          if (!out.cap_hit_time) out.cap_hit_time = ev.time;
          if (!config.cull_leftmost) {
            out.terminated_reason = Termination::kPopulationCap;
            ran_to_horizon = false;
          } else {
            // keep the rightmost ~90% of the cap; ties broken by seniority
            const auto target = std::max<std::int64_t>(
                1, config.population_cap * 9 / 10);
            struct Entry {
              int pos;
              std::uint64_t pid;
              std::uint32_t slot;
            };
            std::vector<Entry> alive;
            alive.reserve(hist.total());
            for (std::uint32_t s = 0; s < slots.size(); ++s)
              if (slots[s].alive) alive.push_back({slots[s].pos, slots[s].pid, s});
            const auto ahead = [](const Entry& a, const Entry& b) {
              if (a.pos != b.pos) return a.pos > b.pos;
              return a.pid < b.pid;
            };
            auto nth = alive.begin() + target;
            std::nth_element(alive.begin(), nth, alive.end(), ahead);
            for (auto it = nth; it != alive.end(); ++it) kill(it->slot);
          }
        }
        break;
      }
    }
    if (!ran_to_horizon) break;
  }

  if (ran_to_horizon)
    while (gidx < config.sample_grid.size()) emit(config.sample_grid[gidx++]);
  return out;
}

std::vector<CapHitRow> cap_hit_scan(const ModelParams& params,
                                    std::span<const std::int64_t> caps,
                                    int replicas, std::uint64_t seed,
                                    double t_max, std::int64_t event_cap) {
  if (replicas < 1) throw std::invalid_argument("cap_hit_scan: replicas must be >= 1");
  const Rng root(seed);
  std::vector<CapHitRow> rows;
  rows.reserve(caps.size());
  for (std::size_t ci = 0; ci < caps.size(); ++ci) {
    CapHitRow row;
    row.cap = caps[ci];
    std::vector<double> times;
    for (int i = 0; i < replicas; ++i) {
      SimConfig cfg{params};
      cfg.t_max = t_max;
      cfg.population_cap = caps[ci];
      cfg.event_cap = event_cap;
      // replica i reuses one seed across all caps: the path is identical up
      // to the smaller cap, so per-replica hit times are monotone in cap and
      // median increments are not drowned in replica noise
      cfg.seed = root.split(i).key();
      const auto traj = simulate(cfg);
      if (traj.terminated_reason == Termination::kPopulationCap)
        times.push_back(*traj.cap_hit_time);
      else if (traj.terminated_reason == Termination::kEventCap)
        ++row.event_capped;
    }
    row.completed = static_cast<int>(times.size());
    if (!times.empty()) {
      row.median = quantile(times, 0.5);
      row.q1 = quantile(times, 0.25);
      row.q3 = quantile(times, 0.75);
    }
    rows.push_back(row);
  }
  return rows;
}

int TreeParticle::position_at(double t) const {
  const auto ups = std::upper_bound(up_times.begin(), up_times.end(), t) -
                   up_times.begin();
  const auto downs = std::upper_bound(down_times.begin(), down_times.end(), t) -
                     down_times.begin();
  return birth_position + static_cast<int>(ups) - static_cast<int>(downs);
}

std::int64_t Tree::population_at(double t) const {
  const auto it = std::upper_bound(
      particles.begin(), particles.end(), t,
      [](double v, const TreeParticle& q) { return v < q.birth_time; });
  return it - particles.begin();
}

int Tree::rightmost_at(double t) const {
  int best = std::numeric_limits<int>::min();
  for (const auto& q : particles) {
    if (q.birth_time > t) break;
    best = std::max(best, q.position_at(t));
  }
  return best;
}

Tree simulate_tree(const ModelParams& params, double start_time, double t_max,
                   int start_position, std::int64_t population_cap,
                   std::int64_t event_cap, std::uint64_t seed) {
  if (!(t_max >= start_time))
    throw std::invalid_argument("simulate_tree: t_max must be >= start_time");
  if (population_cap < 1 || event_cap < 1)
    throw std::invalid_argument("simulate_tree: caps must be >= 1");
  const BranchRate branch{params.beta, params.p};
  const double lambda = params.lambda;
  const Rng root(seed);

  Tree tree;
  tree.start_time = start_time;
  tree.t_max = t_max;
  std::vector<int> pos;
  std::vector<Rng> rngs;
  std::priority_queue<Event, std::vector<Event>, EventLater> queue;

  auto schedule = [&](std::uint32_t i, double now) {
    const double w = 2.0 * lambda + branch(pos[i]);
    if (!(w > 0)) return;
    const double dt = rngs[i].exponential(w);
    const double r = rngs[i].uniform() * w;
    const std::uint8_t kind = r < lambda ? kUp : (r < 2.0 * lambda ? kDown : kBranch);
    queue.push({now + dt, i, i, 0, kind});
  };

  auto spawn = [&](std::int32_t parent, double now, int at) {
    const auto i = static_cast<std::uint32_t>(tree.particles.size());
    TreeParticle q;
    q.parent = parent;
    q.birth_time = now;
    q.birth_position = at;
    tree.particles.push_back(std::move(q));
    pos.push_back(at);
    rngs.push_back(root.split(i));
    schedule(i, now);
    return i;
  };

  spawn(-1, start_time, start_position);
  double reached = start_time;

  while (!queue.empty()) {
    const Event ev = queue.top();
    if (ev.time > t_max) break;
    queue.pop();
    if (tree.event_count >= event_cap) {
      tree.terminated_reason = Termination::kEventCap;
      tree.end_time = reached;
      return tree;
    }
    ++tree.event_count;
    reached = ev.time;
    const auto i = ev.slot;
    switch (ev.kind) {
      case kUp:
      case kDown: {
        auto& q = tree.particles[i];
        (ev.kind == kUp ? q.up_times : q.down_times).push_back(ev.time);
        pos[i] += ev.kind == kUp ? 1 : -1;
        schedule(i, ev.time);
        break;
      }
      case kBranch: {
        schedule(i, ev.time);
        const auto child = spawn(static_cast<std::int32_t>(i), ev.time, pos[i]);
        tree.particles[i].children.push_back(static_cast<std::int32_t>(child));
        tree.particles[i].child_times.push_back(ev.time);
        if (static_cast<std::int64_t>(tree.particles.size()) >= population_cap) {
          tree.terminated_reason = Termination::kPopulationCap;
          tree.end_time = ev.time;
          return tree;
        }
        break;
      }
    }
  }
  tree.end_time = t_max;
  return tree;
}

StartComparison start_position_irrelevance_check(const ModelParams& params,
                                                 int x, int y, double t,
                                                 int replicas,
                                                 std::uint64_t seed,
                                                 std::int64_t cull_cap) {
  if (replicas < 1)
    throw std::invalid_argument("start_position_irrelevance_check: replicas must be >= 1");
  const Rng root(seed);
  auto run_from = [&](int start) {
    std::vector<double> stats;
    stats.reserve(replicas);
    for (int i = 0; i < replicas; ++i) {
      SimConfig cfg{params};
      cfg.t_max = t;
      cfg.population_cap = cull_cap;
      cfg.cull_leftmost = true;
      cfg.sample_grid = {t};
      cfg.seed = root.split(i).key();
      cfg.start_position = start;
      const auto traj = simulate(cfg);
      if (traj.rightmost.empty())
        throw std::runtime_error(
            "start_position_irrelevance_check: event cap hit before t");
      stats.push_back(normalize_rightmost(params, traj.rightmost.back(), t));
    }
    return mean_and_se(stats);
  };
  const auto [mx, sx] = run_from(x);
  const auto [my, sy] = run_from(y);
  StartComparison out;
  out.mean_x = mx;
  out.se_x = sx;
  out.mean_y = my;
  out.se_y = sy;
  out.difference = mx - my;
  out.combined_se = std::sqrt(sx * sx + sy * sy);
  return out;
}

}  // namespace brwlab
