// slitsim: single-slit scattering under discrete-time Newton dynamics.
//
//   slitsim simulate  [--config F] [--seed S] [--workers N] [--out DIR] [--n N] [--tau T]
//   slitsim sweep-tau [--config F] ...
//   slitsim trace     [--config F] [--n N] [--no-record] ...
//   slitsim analyze   CSV [--window W] [--k-sigma K] [--out DIR]
//
// Exit codes: 0 success, 2 configuration or input error, 3 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "slitsim/experiment.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<std::size_t> n;
  std::optional<double> tau;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "experiment config file (key = value)");
  cmd->add_option("--seed", o.seed, "random emission seed");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--n", o.n, "number of trajectories");
  cmd->add_option("--tau", o.tau, "time-discreteness parameter");
}

slitsim::ExperimentConfig resolve(const Overrides& o) {
  slitsim::ExperimentConfig cfg =
      o.config.empty() ? slitsim::default_config() : slitsim::load_config(o.config);
  if (o.seed) cfg.emission.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.out) cfg.output_dir = *o.out;
  if (o.n) cfg.emission.n = *o.n;
  if (o.tau) cfg.step.tau = *o.tau;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-slit scattering of charged particles with discrete time"};
  app.footer(slitsim::config_keys_help());
  app.require_subcommand(1);

  Overrides sim_o, sweep_o, trace_o;
  auto* simulate = app.add_subcommand("simulate", "run one ensemble, write distribution.csv");
  add_common(simulate, sim_o);
  auto* sweep = app.add_subcommand("sweep-tau", "run one ensemble per tau in tau_list");
  add_common(sweep, sweep_o);
  auto* trace = app.add_subcommand("trace", "record swept trajectories, write CSV and SVG");
  add_common(trace, trace_o);
  bool no_record = false;
  trace->add_flag("--no-record", no_record, "disable path recording (rejected)");

  auto* analyze = app.add_subcommand("analyze", "find fringe extrema in a distribution.csv");
  std::string csv;
  int window = 5;
  double k_sigma = 5;
  std::string analyze_out = ".";
  analyze->add_option("csv", csv, "distribution.csv to analyze")->required();
  analyze->add_option("--window", window, "smoothing window (odd)");
  analyze->add_option("--k-sigma", k_sigma, "Poisson significance for extrema");
  analyze->add_option("--out", analyze_out, "directory for extrema.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate) {
      const auto cfg = resolve(sim_o);
      const auto res = slitsim::cmd_simulate(cfg);
      const auto& h = res.histogram;
      std::cout << "emitted " << h.n_emitted << ", detected " << h.n_detected << ", blocked "
                << h.n_blocked << ", escaped " << h.n_escaped << ", step limit " << h.n_steplimit
                << " (" << res.wall_seconds << " s) -> " << cfg.output_dir.string() << "\n";
    } else if (*sweep) {
      const auto cfg = resolve(sweep_o);
      const auto res = slitsim::cmd_sweep_tau(cfg);
      for (const auto& r : res.rows) {
        std::cout << "tau " << r.tau << ": detected " << r.histogram.n_detected << ", maxima "
                  << r.n_maxima << ", oscillation index " << r.oscillation_index << "\n";
      }
    } else if (*trace) {
      const auto cfg = resolve(trace_o);
      const std::size_t n = trace_o.n ? *trace_o.n : 250;
      const auto res = slitsim::cmd_trace(cfg, n, !no_record);
      std::cout << res.trajectories.size() << " trajectories, " << res.n_detected
                << " detected -> " << cfg.output_dir.string() << "\n";
    } else if (*analyze) {
      slitsim::cmd_analyze(csv, window, k_sigma, analyze_out, std::cout);
    }
  } catch (const slitsim::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const slitsim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
