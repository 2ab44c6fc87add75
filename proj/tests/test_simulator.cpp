#include <doctest.h>

#include <cmath>
#include <vector>

#include "brwlab/rng.hpp"
#include "brwlab/simulator.hpp"
#include "brwlab/stats.hpp"

using namespace brwlab;

namespace {
// chi-square 0.99 quantile, 10 degrees of freedom
constexpr double kChi2Df10P99 = 23.209251158954356;
}  // namespace

TEST_CASE("beta = 0 reduces to a single walk") {
  SimConfig cfg{{1.0, 0.0, 0.0}};
  cfg.t_max = 5.0;
  cfg.sample_grid = {1.0, 2.5, 5.0};
  cfg.seed = 17;
  const auto out = simulate(cfg);
  CHECK(out.terminated_reason == Termination::kHorizon);
  CHECK(out.branch_count == 0);
  for (std::size_t i = 0; i < out.sample_times.size(); ++i) {
    CHECK(out.population[i] == 1);
    CHECK(out.rightmost[i] == out.leftmost[i]);
  }
}

TEST_CASE("lambda = 0 gives a motionless Yule process") {
  // binary fission at rate beta when p = 0: E N_t = e^{beta t}
  const double beta = 1.0, t = 3.0;
  const Rng root(5);
  std::vector<double> pops;
  for (int i = 0; i < 10000; ++i) {
    SimConfig cfg{{0.0, beta, 0.0}};
    cfg.t_max = t;
    cfg.sample_grid = {t};
    cfg.seed = root.split(i).key();
    const auto out = simulate(cfg);
    CHECK(out.rightmost.back() == 0);
    CHECK(out.leftmost.back() == 0);
    pops.push_back(static_cast<double>(out.population.back()));
  }
  const auto [mean, se] = mean_and_se(pops);
  CHECK(std::abs(mean - std::exp(beta * t)) <= 3.0 * se);
}

TEST_CASE("Yule population is geometric at t = 1") {
  // P(N_t = k) = e^{-t} (1 - e^{-t})^{k-1}; chi-square over k = 1..10 + tail
  const double t = 1.0;
  const int n = 20000;
  const Rng root(29);
  std::vector<double> observed(11, 0.0);
  for (int i = 0; i < n; ++i) {
    SimConfig cfg{{0.0, 1.0, 0.0}};
    cfg.t_max = t;
    cfg.sample_grid = {t};
    cfg.seed = root.split(i).key();
    const auto k = simulate(cfg).population.back();
    observed[k <= 10 ? k - 1 : 10] += 1.0;
  }
  const double q = std::exp(-t);
  double chi2 = 0.0, tail = 1.0;
  for (int k = 1; k <= 10; ++k) {
    const double pk = q * std::pow(1.0 - q, k - 1);
    tail -= pk;
    chi2 += (observed[k - 1] - n * pk) * (observed[k - 1] - n * pk) / (n * pk);
  }
  chi2 += (observed[10] - n * tail) * (observed[10] - n * tail) / (n * tail);
  CHECK(chi2 < kChi2Df10P99);
}

TEST_CASE("population equals one plus the branch count") {
  SimConfig cfg{{1.0, 0.5, 0.5}};
  cfg.t_max = 6.0;
  cfg.sample_grid = {6.0};
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    cfg.seed = seed;
    const auto out = simulate(cfg);
    REQUIRE(out.terminated_reason == Termination::kHorizon);
    CHECK(out.population.back() == 1 + out.branch_count);
  }
}

TEST_CASE("simulate is deterministic per seed") {
  SimConfig cfg{{1.0, 1.0, 0.5}};
  cfg.t_max = 4.0;
  cfg.sample_grid = {1.0, 2.0, 3.0, 4.0};
  cfg.seed = 1234;
  const auto a = simulate(cfg);
  const auto b = simulate(cfg);
  CHECK(a.population == b.population);
  CHECK(a.rightmost == b.rightmost);
  CHECK(a.leftmost == b.leftmost);
  CHECK(a.event_count == b.event_count);
  cfg.seed = 1235;
  const auto c = simulate(cfg);
  CHECK(a.event_count != c.event_count);
}

TEST_CASE("population cap terminates and records the hit time") {
  SimConfig cfg{{1.0, 2.0, 1.0}};
  cfg.t_max = 100.0;
  cfg.population_cap = 50;
  cfg.sample_grid = {};
  cfg.seed = 3;
  const auto out = simulate(cfg);
  CHECK(out.terminated_reason == Termination::kPopulationCap);
  REQUIRE(out.cap_hit_time.has_value());
  CHECK(*out.cap_hit_time > 0.0);
  CHECK(*out.cap_hit_time < 100.0);
}

TEST_CASE("culling keeps the run alive past the cap") {
  SimConfig cfg{{1.0, 2.0, 1.0}};
  cfg.t_max = 4.0;
  cfg.population_cap = 50;
  cfg.cull_leftmost = true;
  cfg.sample_grid = {4.0};
  cfg.seed = 3;
  const auto out = simulate(cfg);
  CHECK(out.terminated_reason == Termination::kHorizon);
  REQUIRE(out.cap_hit_time.has_value());
  CHECK(out.population.back() <= 50);
  CHECK(out.population.back() > 0);
  CHECK(out.rightmost.back() >= out.leftmost.back());
}

TEST_CASE("event cap terminates") {
  SimConfig cfg{{1.0, 1.0, 0.0}};
  cfg.t_max = 1e9;
  cfg.event_cap = 10000;
  cfg.seed = 8;
  const auto out = simulate(cfg);
  CHECK(out.terminated_reason == Termination::kEventCap);
  CHECK(out.event_count <= 10000);
}

TEST_CASE("branch count grows with beta") {
  const Rng root(41);
  double prev = -1.0;
  for (double beta : {0.2, 1.0, 3.0}) {
    std::vector<double> counts;
    for (int i = 0; i < 2000; ++i) {
      SimConfig cfg{{1.0, beta, 0.0}};
      cfg.t_max = 3.0;
      cfg.seed = root.split(static_cast<std::uint64_t>(beta * 100) + i).key();
      counts.push_back(static_cast<double>(simulate(cfg).branch_count));
    }
    const auto [mean, se] = mean_and_se(counts);
    CHECK(mean > prev);
    // binary fission at constant rate beta: E N_t - 1 = e^{beta t} - 1
    CHECK(std::abs(mean - (std::exp(beta * 3.0) - 1.0)) <= 3.0 * se);
    prev = mean;
  }
}

TEST_CASE("tree genealogy is consistent") {
  const auto tree = simulate_tree({1.0, 1.0, 0.5}, 0.0, 5.0, 0, 100000,
                                  10'000'000, 77);
  REQUIRE(tree.terminated_reason == Termination::kHorizon);
  REQUIRE(!tree.particles.empty());
  CHECK(tree.particles[0].parent == -1);
  std::int64_t edges = 0;
  for (std::size_t i = 0; i < tree.particles.size(); ++i) {
    const auto& part = tree.particles[i];
    if (i > 0) {
      const auto& par = tree.particles[part.parent];
      // child i starts where the parent sat at the split time
      CHECK(part.birth_position == par.position_at(part.birth_time));
      CHECK(part.birth_time >= par.birth_time);
    }
    REQUIRE(part.children.size() == part.child_times.size());
    for (std::size_t c = 0; c < part.children.size(); ++c) {
      CHECK(tree.particles[part.children[c]].parent ==
            static_cast<std::int32_t>(i));
      CHECK(tree.particles[part.children[c]].birth_time ==
            part.child_times[c]);
      ++edges;
    }
    // jump times sorted and inside the lifetime
    for (const auto* times : {&part.up_times, &part.down_times})
      for (std::size_t j = 0; j < times->size(); ++j) {
        CHECK((*times)[j] >= part.birth_time);
        CHECK((*times)[j] <= tree.end_time);
        if (j > 0) CHECK((*times)[j] > (*times)[j - 1]);
      }
  }
  CHECK(edges + 1 == static_cast<std::int64_t>(tree.particles.size()));
  CHECK(tree.population_at(5.0) ==
        static_cast<std::int64_t>(tree.particles.size()));
  CHECK(tree.population_at(0.0) >= 1);
}

TEST_CASE("tree and trajectory agree on the law of the population") {
  const Rng root(53);
  std::vector<double> from_tree, from_sim;
  for (int i = 0; i < 4000; ++i) {
    const auto tree = simulate_tree({1.0, 1.0, 0.0}, 0.0, 2.0, 0, 100000,
                                    10'000'000, root.split(i).key());
    from_tree.push_back(static_cast<double>(tree.population_at(2.0)));
    SimConfig cfg{{1.0, 1.0, 0.0}};
    cfg.t_max = 2.0;
    cfg.sample_grid = {2.0};
    cfg.seed = root.split(100000 + i).key();
    from_sim.push_back(static_cast<double>(simulate(cfg).population.back()));
  }
  const auto [m1, s1] = mean_and_se(from_tree);
  const auto [m2, s2] = mean_and_se(from_sim);
  CHECK(std::abs(m1 - m2) <= 3.0 * std::hypot(s1, s2));
  CHECK(std::abs(m1 - std::exp(2.0)) <= 3.0 * s1);
}

TEST_CASE("start position enters only through a shift when p = 0") {
  const auto same =
      start_position_irrelevance_check({1.0, 1.0, 0.0}, 2, 2, 4.0, 50, 9);
  CHECK(same.difference == 0.0);
  const auto cmp =
      start_position_irrelevance_check({1.0, 1.0, 0.0}, 0, 3, 6.0, 400, 9);
  CHECK(std::abs(cmp.difference) <= 3.0 * cmp.combined_se + 3.0 / 6.0);
}

TEST_CASE("cap hit times shrink as the breeding strengthens") {
  const std::vector<std::int64_t> caps{200};
  const auto weak = cap_hit_scan({1.0, 0.5, 1.0}, caps, 40, 21, 1e6);
  const auto strong = cap_hit_scan({1.0, 4.0, 1.0}, caps, 40, 21, 1e6);
  REQUIRE(weak.size() == 1);
  REQUIRE(strong.size() == 1);
  CHECK(weak[0].completed == 40);
  CHECK(strong[0].completed == 40);
  CHECK(strong[0].median < weak[0].median);
  CHECK(weak[0].q1 <= weak[0].median);
  CHECK(weak[0].median <= weak[0].q3);
}
