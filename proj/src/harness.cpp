#include "brwlab/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "brwlab/manytoone.hpp"
#include "brwlab/rng.hpp"
#include "brwlab/simulator.hpp"
#include "brwlab/stats.hpp"

namespace brwlab {

namespace {

using nlohmann::json;

const char* kVersion = "0.1.0";

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt(std::int64_t v) { return std::to_string(v); }

std::string to_string(Termination reason) {
  switch (reason) {
    case Termination::kHorizon: return "horizon";
    case Termination::kPopulationCap: return "population_cap";
    case Termination::kEventCap: return "event_cap";
  }
  return "unknown";
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::kPZero: return "p_zero";
    case Regime::kPIn01: return "p_in_0_1";
    case Regime::kPOne: return "p_one";
    case Regime::kExplosive: return "explosive";
  }
  return "unknown";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

}  // namespace

Experiment experiment_from_string(const std::string& name) {
  if (name == "analytics") return Experiment::kAnalytics;
  if (name == "simulate") return Experiment::kSimulate;
  if (name == "cap-scan") return Experiment::kCapScan;
  if (name == "rightmost-scan") return Experiment::kRightmostScan;
  if (name == "spine-regime") return Experiment::kSpineRegime;
  if (name == "many-to-one") return Experiment::kManyToOne;
  if (name == "corridor") return Experiment::kCorridor;
  throw std::invalid_argument("unknown experiment: " + name);
}

std::string to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::kAnalytics: return "analytics";
    case Experiment::kSimulate: return "simulate";
    case Experiment::kCapScan: return "cap-scan";
    case Experiment::kRightmostScan: return "rightmost-scan";
    case Experiment::kSpineRegime: return "spine-regime";
    case Experiment::kManyToOne: return "many-to-one";
    case Experiment::kCorridor: return "corridor";
  }
  throw std::invalid_argument("unknown experiment enum value");
}

ThetaSchedule schedule_from(const ExperimentConfig& config) {
  const auto& f = config.theta_family;
  if (f == "identity") return ThetaSchedule::identity();
  if (f == "case_a") return ThetaSchedule::case_a(config.theta0);
  if (f == "case_b") return ThetaSchedule::case_b(config.tilt_c, config.model);
  if (f == "case_c") return ThetaSchedule::case_c(config.alpha);
  if (f == "explosion")
    return ThetaSchedule::explosion(config.horizon_T, config.tilt_c);
  if (f == "case_b_upper")
    return ThetaSchedule::case_b_upper(config.tilt_c, config.model);
  if (f == "case_c_upper") return ThetaSchedule::case_c_upper(config.alpha);
  throw std::invalid_argument("unknown theta family: " + f);
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = to_string(c.experiment);
  j["lambda"] = c.model.lambda;
  j["beta"] = c.model.beta;
  j["p"] = c.model.p;
  j["theta_family"] = c.theta_family;
  j["theta0"] = c.theta0;
  j["tilt_c"] = c.tilt_c;
  j["alpha"] = c.alpha;
  j["horizon_T"] = c.horizon_T;
  j["t_grid"] = c.t_grid;
  j["t_max"] = c.t_max;
  j["caps"] = c.caps;
  j["replicas"] = c.replicas;
  j["seed"] = c.seed;
  j["population_cap"] = c.population_cap;
  j["event_cap"] = c.event_cap;
  j["start_position"] = c.start_position;
  j["cull_leftmost"] = c.cull_leftmost;
  j["corridor_shape"] = c.corridor_shape;
  j["corridor_level"] = c.corridor_level;
  j["delta"] = c.delta;
  j["out"] = c.out;
  return j.dump();
}

ExperimentConfig config_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  static const char* known[] = {
      "experiment", "lambda", "beta", "p", "theta_family", "theta0",
      "tilt_c", "alpha", "horizon_T", "t_grid", "t_max", "caps",
      "replicas", "seed", "population_cap", "event_cap", "start_position",
      "cull_leftmost", "corridor_shape", "corridor_level", "delta", "out"};
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument("unknown config key: " + key);
  }
  ExperimentConfig d;
  ExperimentConfig c{
      experiment_from_string(j.value("experiment", std::string("analytics"))),
      ModelParams(j.value("lambda", d.model.lambda),
                  j.value("beta", d.model.beta), j.value("p", d.model.p))};
  c.theta_family = j.value("theta_family", d.theta_family);
  c.theta0 = j.value("theta0", d.theta0);
  c.tilt_c = j.value("tilt_c", d.tilt_c);
  c.alpha = j.value("alpha", d.alpha);
  c.horizon_T = j.value("horizon_T", d.horizon_T);
  c.t_grid = j.value("t_grid", d.t_grid);
  c.t_max = j.value("t_max", d.t_max);
  c.caps = j.value("caps", d.caps);
  c.replicas = j.value("replicas", d.replicas);
  c.seed = j.value("seed", d.seed);
  c.population_cap = j.value("population_cap", d.population_cap);
  c.event_cap = j.value("event_cap", d.event_cap);
  c.start_position = j.value("start_position", d.start_position);
  c.cull_leftmost = j.value("cull_leftmost", d.cull_leftmost);
  c.corridor_shape = j.value("corridor_shape", d.corridor_shape);
  c.corridor_level = j.value("corridor_level", d.corridor_level);
  c.delta = j.value("delta", d.delta);
  c.out = j.value("out", d.out);
  return c;
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  return fnv1a(config_to_json(config));
}

ConvergenceTable rightmost_scan(const ModelParams& params,
                                std::span<const double> t_grid, int replicas,
                                std::uint64_t seed,
                                std::int64_t population_cap) {
  if (params.p > 1)
    throw std::domain_error("rightmost_scan: no finite asymptotic for p > 1");
  if (t_grid.empty())
    throw std::invalid_argument("rightmost_scan: t_grid must be nonempty");
  if (replicas < 1)
    throw std::invalid_argument("rightmost_scan: replicas must be >= 1");

  const Rng root(seed);
  std::vector<std::vector<double>> stats(t_grid.size());
  for (int r = 0; r < replicas; ++r) {
    SimConfig cfg{params};
    cfg.t_max = t_grid.back();
    cfg.sample_grid.assign(t_grid.begin(), t_grid.end());
    cfg.population_cap = population_cap;
    cfg.cull_leftmost = true;
    cfg.seed = root.split(r).key();
    const auto traj = simulate(cfg);
    if (traj.rightmost.size() != t_grid.size())
      throw std::runtime_error("rightmost_scan: run ended before the last grid time");
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      stats[i].push_back(normalize_rightmost(params, traj.rightmost[i], t_grid[i]));
  }
  const double predicted = normalized_limit(params);
  ConvergenceTable table;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    ScanRow row;
    row.t = t_grid[i];
    const auto [mean, se] = mean_and_se(stats[i]);
    row.statistic = params.p == 0 ? mean : median(stats[i]);
    row.mc_error = se;
    row.predicted = predicted;
    row.ratio = predicted != 0 ? row.statistic / predicted : 0.0;
    table.push_back(row);
  }
  return table;
}

namespace {

struct Outputs {
  std::string csv;        // body rows, header line included
  json results;           // experiment-specific scalars
  std::string series;     // optional extra CSV (spine regime)
};

Outputs run_analytics(const ExperimentConfig& c) {
  Outputs out;
  const auto pred = classify(c.model);
  std::ostringstream csv;
  csv << "quantity,value\n";
  csv << "regime," << to_string(pred.regime) << "\n";
  json res;
  res["regime"] = to_string(pred.regime);
  switch (pred.regime) {
    case Regime::kPZero: {
      const double speed = c.model.lambda * (pred.theta_hat - 1.0 / pred.theta_hat);
      csv << "theta_hat," << fmt(pred.theta_hat) << "\n";
      csv << "speed," << fmt(speed) << "\n";
      res["theta_hat"] = pred.theta_hat;
      res["speed"] = speed;
      break;
    }
    case Regime::kPIn01:
      csv << "b_hat," << fmt(pred.b_hat) << "\n";
      csv << "c_hat," << fmt(pred.c_hat) << "\n";
      res["b_hat"] = pred.b_hat;
      res["c_hat"] = pred.c_hat;
      break;
    case Regime::kPOne:
      csv << "exp_rate," << fmt(pred.exp_rate) << "\n";
      res["exp_rate"] = pred.exp_rate;
      break;
    case Regime::kExplosive:
      break;
  }
  out.csv = csv.str();
  out.results = res;
  return out;
}

Outputs run_simulate(const ExperimentConfig& c) {
  SimConfig cfg{c.model};
  cfg.t_max = c.t_max;
  cfg.population_cap = c.population_cap;
  cfg.event_cap = c.event_cap;
  cfg.seed = c.seed;
  cfg.start_position = c.start_position;
  cfg.cull_leftmost = c.cull_leftmost;
  if (!c.t_grid.empty()) {
    cfg.sample_grid = c.t_grid;
  } else {
    for (int i = 0; i <= 10; ++i)
      cfg.sample_grid.push_back(c.t_max * i / 10.0);
  }
  const auto traj = simulate(cfg);
  Outputs out;
  std::ostringstream csv;
  csv << "t,population,rightmost,leftmost\n";
  for (std::size_t i = 0; i < traj.sample_times.size(); ++i)
    csv << fmt(traj.sample_times[i]) << "," << fmt(traj.population[i]) << ","
        << traj.rightmost[i] << "," << traj.leftmost[i] << "\n";
  out.csv = csv.str();
  out.results["terminated_reason"] = to_string(traj.terminated_reason);
  out.results["event_count"] = traj.event_count;
  out.results["branch_count"] = traj.branch_count;
  if (traj.cap_hit_time)
    out.results["cap_hit_time"] = *traj.cap_hit_time;
  return out;
}

Outputs run_cap_scan(const ExperimentConfig& c) {
  const auto rows = cap_hit_scan(c.model, c.caps, c.replicas, c.seed, c.t_max,
                                 c.event_cap);
  Outputs out;
  std::ostringstream csv;
  csv << "cap,median,q1,q3,completed,event_capped\n";
  for (const auto& r : rows)
    csv << r.cap << "," << fmt(r.median) << "," << fmt(r.q1) << ","
        << fmt(r.q3) << "," << r.completed << "," << r.event_capped << "\n";
  out.csv = csv.str();
  return out;
}

Outputs run_rightmost_scan(const ExperimentConfig& c) {
  const auto table =
      rightmost_scan(c.model, c.t_grid, c.replicas, c.seed, c.population_cap);
  Outputs out;
  std::ostringstream csv;
  csv << "t,statistic,mc_error,predicted,ratio\n";
  for (const auto& r : table)
    csv << fmt(r.t) << "," << fmt(r.statistic) << "," << fmt(r.mc_error) << ","
        << fmt(r.predicted) << "," << fmt(r.ratio) << "\n";
  out.csv = csv.str();
  out.results["predicted"] = table.empty() ? 0.0 : table.back().predicted;
  return out;
}

Outputs run_spine_regime(const ExperimentConfig& c) {
  const auto theta = schedule_from(c);
  const auto scan = regime_sup_statistic(c.model, theta, c.t_grid, c.replicas,
                                         c.seed, c.population_cap, c.event_cap);
  Outputs out;
  std::ostringstream csv;
  csv << "replica,sup_martingale,first,last\n";
  for (std::size_t r = 0; r < scan.sup.size(); ++r)
    csv << r << "," << fmt(scan.sup[r]) << "," << fmt(scan.first[r]) << ","
        << fmt(scan.last[r]) << "\n";
  out.csv = csv.str();
  out.results["truncated"] = scan.truncated;
  out.results["theta_family"] = c.theta_family;

  // per-time series for the first replica
  const auto tree =
      simulate_tilted(c.model, theta, c.t_grid.back(), c.population_cap,
                      c.event_cap, Rng(c.seed).split(0).key());
  std::ostringstream series;
  series << "t,martingale,spine_term,sum_term,spine_position\n";
  for (double u : c.t_grid) {
    if (u > tree.end_time) break;
    const double m = additive_martingale(tree, theta, c.model, u);
    const auto dec = spine_decomposition(tree.spine, theta, c.model, u);
    series << fmt(u) << "," << fmt(m) << "," << fmt(dec.spine_term) << ","
           << fmt(dec.sum_term) << "," << tree.spine.position_at(u) << "\n";
  }
  out.series = series.str();
  return out;
}

Outputs weighted_outputs(const WeightedPathEstimate& est) {
  Outputs out;
  std::ostringstream csv;
  csv << "mean,standard_error,replicas,max_weight,hits\n";
  csv << fmt(est.mean) << "," << fmt(est.standard_error) << "," << est.replicas
      << "," << fmt(est.max_weight) << "," << est.hits << "\n";
  out.csv = csv.str();
  out.results["estimate"] = est.mean;
  out.results["standard_error"] = est.standard_error;
  out.results["replicas"] = est.replicas;
  out.results["max_weight"] = est.max_weight;
  out.results["hits"] = est.hits;
  return out;
}

Outputs run_corridor(const ExperimentConfig& c) {
  std::function<double(double)> f;
  if (c.corridor_shape == "constant") {
    const double level = c.corridor_level;
    f = [level](double) { return level; };
  } else if (c.corridor_shape == "linear") {
    const double slope = c.corridor_level;
    f = [slope](double s) { return slope * s; };
  } else if (c.corridor_shape == "optimal") {
    if (c.model.p == 0) {
      const double slope = rightmost_speed(c.model);
      f = [slope](double s) { return slope * s; };
    } else {
      // start slightly inside the corridor; the degenerate-at-zero ODE
      // needs a positive initial value
      const double t0 = std::min(1e-3, c.t_max / 2.0);
      std::vector<double> grid;
      for (int i = 0; i <= 2048; ++i)
        grid.push_back(t0 + (c.t_max - t0) * i / 2048.0);
      auto path = optimal_path(c.model, grid, std::min(1.0, c.delta / 2.0));
      f = [grid = std::move(grid), path = std::move(path)](double s) {
        if (s <= grid.front()) return path.front();
        const auto it = std::upper_bound(grid.begin(), grid.end(), s);
        const auto i = static_cast<std::size_t>(it - grid.begin());
        if (i >= grid.size()) return path.back();
        const double w = (s - grid[i - 1]) / (grid[i] - grid[i - 1]);
        return path[i - 1] * (1.0 - w) + path[i] * w;
      };
    }
  } else {
    throw std::invalid_argument("unknown corridor shape: " + c.corridor_shape);
  }
  return weighted_outputs(
      corridor_expectation(c.model, f, c.delta, c.t_max, c.replicas, c.seed));
}

}  // namespace

void run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  Outputs out;
  switch (config.experiment) {
    case Experiment::kAnalytics: out = run_analytics(config); break;
    case Experiment::kSimulate: out = run_simulate(config); break;
    case Experiment::kCapScan: out = run_cap_scan(config); break;
    case Experiment::kRightmostScan: out = run_rightmost_scan(config); break;
    case Experiment::kSpineRegime: out = run_spine_regime(config); break;
    case Experiment::kManyToOne:
      out = weighted_outputs(expected_population(config.model, config.t_max,
                                                 config.replicas, config.seed));
      break;
    case Experiment::kCorridor: out = run_corridor(config); break;
  }
  const auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();

  const std::string header = "# config_hash=" + hex64(config_hash(config)) +
                             " seed=" + std::to_string(config.seed) + "\n";
  {
    std::ofstream csv(config.out + ".csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open " + config.out + ".csv");
    csv << header << out.csv;
  }
  if (!out.series.empty()) {
    std::ofstream series(config.out + "_series.csv", std::ios::binary);
    if (!series)
      throw std::runtime_error("cannot open " + config.out + "_series.csv");
    series << header << out.series;
  }
  json meta;
  meta["config"] = json::parse(config_to_json(config));
  meta["config_hash"] = hex64(config_hash(config));
  meta["version"] = kVersion;
  meta["wall_time_ms"] = elapsed;
  meta["results"] = out.results;
  std::ofstream js(config.out + ".json", std::ios::binary);
  if (!js) throw std::runtime_error("cannot open " + config.out + ".json");
  js << meta.dump(2) << "\n";
}

}  // namespace brwlab
