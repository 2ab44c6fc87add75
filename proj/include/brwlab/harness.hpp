#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "brwlab/analytics.hpp"
#include "brwlab/spine.hpp"

namespace brwlab {

enum class Experiment {
  kAnalytics,
  kSimulate,
  kCapScan,
  kRightmostScan,
  kSpineRegime,
  kManyToOne,
  kCorridor,
};

Experiment experiment_from_string(const std::string& name);
std::string to_string(Experiment experiment);

// One record fully determines a run; it is echoed into the JSON metadata
// next to the outputs.
struct ExperimentConfig {
  Experiment experiment = Experiment::kAnalytics;
  ModelParams model{1.0, 1.0, 0.0};

  // tilt schedule (spine-regime runs): identity, case_a, case_b, case_c,
  // explosion, case_b_upper, case_c_upper
  std::string theta_family = "identity";
  double theta0 = 1.5;   // case_a
  double tilt_c = 1.0;   // case_b / explosion
  double alpha = 0.5;    // case_c
  double horizon_T = 1;  // explosion

  std::vector<double> t_grid;
  double t_max = 10.0;
  std::vector<std::int64_t> caps{100, 1000, 10000};
  int replicas = 100;
  std::uint64_t seed = 1;
  std::int64_t population_cap = 1'000'000;
  std::int64_t event_cap = 100'000'000;
  int start_position = 0;
  bool cull_leftmost = false;

  // corridor runs: f constant at `level`, or `level * s` (linear)
  std::string corridor_shape = "constant";
  double corridor_level = 0.0;
  double delta = 1.0;

  std::string out = "out";  // stem; writes <out>.csv and <out>.json
};

ThetaSchedule schedule_from(const ExperimentConfig& config);

ExperimentConfig config_from_json(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

struct ScanRow {
  double t = 0;
  double statistic = 0;  // mean of the normalized R_t for p = 0, median else
  double mc_error = 0;   // standard error of the mean
  double predicted = 0;
  double ratio = 0;  // statistic / predicted
};
using ConvergenceTable = std::vector<ScanRow>;

// Per grid time, MC statistics of the regime-normalized rightmost position
// against the analytic limit.  Simulations track the front with leftmost
// culling at population_cap so large horizons stay feasible.
ConvergenceTable rightmost_scan(const ModelParams& params,
                                std::span<const double> t_grid, int replicas,
                                std::uint64_t seed,
                                std::int64_t population_cap = 20'000);

// Executes the experiment and writes <out>.csv (data, headed by the config
// hash and seed) plus <out>.json (config echo and run metadata).  Re-running
// the same config reproduces the CSV byte for byte.
void run(const ExperimentConfig& config);

}  // namespace brwlab
