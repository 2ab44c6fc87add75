#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "brwlab/harness.hpp"

namespace {

brwlab::ExperimentConfig load_base_config(int argc, char** argv) {
  // --config is applied first; explicit flags then override its fields
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0) {
      std::ifstream in(argv[i + 1]);
      if (!in)
        throw std::invalid_argument(std::string("cannot read config file: ") +
                                    argv[i + 1]);
      std::ostringstream text;
      text << in.rdbuf();
      return brwlab::config_from_json(text.str());
    }
  }
  return {};
}

void add_common_options(CLI::App& cmd, brwlab::ExperimentConfig& cfg) {
  cmd.add_option("--lambda", cfg.model.lambda, "jump rate per direction");
  cmd.add_option("--beta", cfg.model.beta, "breeding coefficient");
  cmd.add_option("--p", cfg.model.p, "breeding exponent");
  cmd.add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  cmd.add_option("--replicas", cfg.replicas, "replica count")
      ->capture_default_str();
  cmd.add_option("--out", cfg.out, "output stem (<out>.csv, <out>.json)")
      ->capture_default_str();
  cmd.add_option("--t-max", cfg.t_max, "time horizon");
  cmd.add_option("--t-grid", cfg.t_grid, "sample times (ascending)")
      ->delimiter(',');
  cmd.add_option("--population-cap", cfg.population_cap, "population cap");
  cmd.add_option("--event-cap", cfg.event_cap, "event cap");
  cmd.add_option("--start", cfg.start_position, "start position");
  cmd.add_flag("--cull", cfg.cull_leftmost,
               "keep only the rightmost particles at the cap");
  cmd.add_option("--config", "JSON config file (flags override its fields)");
}

}  // namespace

int main(int argc, char** argv) {
  brwlab::ExperimentConfig cfg;
  try {
    cfg = load_base_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"branching random walk laboratory"};
  app.require_subcommand(0, 1);
  add_common_options(app, cfg);

  struct Sub {
    const char* name;
    const char* help;
    brwlab::Experiment experiment;
  };
  const Sub subs[] = {
      {"analytics", "regime constants and predictions", brwlab::Experiment::kAnalytics},
      {"simulate", "one event-driven run, (t, |N_t|, R_t) series", brwlab::Experiment::kSimulate},
      {"cap-scan", "cap-hit time ladder (explosion proxy)", brwlab::Experiment::kCapScan},
      {"rightmost-scan", "normalized R_t against the analytic limit", brwlab::Experiment::kRightmostScan},
      {"spine-regime", "martingale sup statistics under a tilt", brwlab::Experiment::kSpineRegime},
      {"many-to-one", "Feynman-Kac estimate of E|N_t|", brwlab::Experiment::kManyToOne},
      {"corridor", "expected particles tracking a path", brwlab::Experiment::kCorridor},
  };
  for (const auto& sub : subs) {
    auto* cmd = app.add_subcommand(sub.name, sub.help);
    add_common_options(*cmd, cfg);
    if (sub.experiment == brwlab::Experiment::kCapScan)
      cmd->add_option("--caps", cfg.caps, "population caps (ascending)")
          ->delimiter(',');
    if (sub.experiment == brwlab::Experiment::kSpineRegime) {
      cmd->add_option("--theta-family", cfg.theta_family,
                      "identity|case_a|case_b|case_c|explosion|case_b_upper|"
                      "case_c_upper");
      cmd->add_option("--theta0", cfg.theta0, "case_a tilt value");
      cmd->add_option("--tilt-c", cfg.tilt_c, "case_b/explosion exponent");
      cmd->add_option("--alpha", cfg.alpha, "case_c exponent");
      cmd->add_option("--T", cfg.horizon_T, "explosion horizon");
    }
    if (sub.experiment == brwlab::Experiment::kCorridor) {
      cmd->add_option("--shape", cfg.corridor_shape, "constant|linear|optimal");
      cmd->add_option("--level", cfg.corridor_level, "level or slope of f");
      cmd->add_option("--delta", cfg.delta, "corridor half-width");
    }
    cmd->callback([&cfg, &sub] { cfg.experiment = sub.experiment; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    brwlab::run(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
