#pragma once

// Declarative experiment configs and the simulate / sweep-tau / trace /
// analyze commands behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "slitsim/analysis.hpp"
#include "slitsim/ensemble.hpp"

namespace slitsim {

struct ExperimentConfig {
  FieldParams<double> field;
  Geometry geometry;
  StepParams<double> step;
  EmissionSpec emission;
  HistogramSpec histogram;
  std::vector<double> tau_list{0.05, 0.01, 0.001};
  std::filesystem::path output_dir{"out"};
  unsigned workers{1};
  int window{5};
  double k_sigma{5};

  /// Re-checks every module invariant, including R consistency.
  void validate() const;
};

/// Single-slit setup with D=5, d=25, R=5, v0=12, q*sigma=-1, r=0.2, tau=0.05,
/// angles uniform in +-45.5 degrees, 0.4-wide bins over [-25, 25].
ExperimentConfig default_config();

/// Parses `key = value` lines ('#' starts a comment) on top of
/// default_config(). Unknown or repeated keys are ConfigErrors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One line per accepted key with its meaning.
std::string config_keys_help();

/// The config in the same `key = value` form parse_config accepts.
std::string describe(const ExperimentConfig& cfg);

/// "%.17g" formatting used by every emitted file.
std::string format_number(double v);

struct SimulateResult {
  Histogram histogram;
  double wall_seconds{0};
};

/// Writes distribution.csv and report.txt into cfg.output_dir.
SimulateResult cmd_simulate(const ExperimentConfig& cfg);

struct SweepRow {
  double tau{0};
  Histogram histogram;
  std::size_t n_maxima{0};
  double oscillation_index{0};  // NaN when nothing was detected
};

struct SweepResult {
  std::vector<SweepRow> rows;
  struct Pair {
    double tau_a, tau_b, total_variation;
  };
  std::vector<Pair> pairs;
};

/// Runs one ensemble per entry of cfg.tau_list (non-increasing). Writes
/// distribution_<i>_tau_<tau>.csv per entry, sweep_report.csv, sweep_pairs.csv
/// and report.txt.
SweepResult cmd_sweep_tau(const ExperimentConfig& cfg);

struct TraceResult {
  std::vector<TrajectoryRecord> trajectories;
  std::vector<double> alphas;
  std::size_t n_detected{0};
};

/// Sweeps n_trajectories angles over the emission range at cfg.step.tau and
/// writes trajectories.csv and trajectories.svg. `record` must be true.
TraceResult cmd_trace(const ExperimentConfig& cfg, std::size_t n_trajectories, bool record = true);

/// Renders recorded trajectories over the experiment geometry.
std::string render_svg(const ExperimentConfig& cfg, const TraceResult& trace);

struct LoadedDistribution {
  HistogramSpec spec;
  std::vector<std::uint64_t> counts;
  std::vector<double> frequencies;
  std::uint64_t n_detected{0};
};

/// Reads a distribution.csv. Malformed files, or files without any counts,
/// raise ConfigError.
LoadedDistribution read_distribution(const std::filesystem::path& csv);

/// Extrema of a distribution.csv, printed to `out` and written to
/// out_dir/extrema.csv.
ExtremaReport cmd_analyze(const std::filesystem::path& csv, int window, double k_sigma,
                          const std::filesystem::path& out_dir, std::ostream& out);

}  // namespace slitsim
