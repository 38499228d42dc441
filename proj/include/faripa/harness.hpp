#ifndef FARIPA_HARNESS_HPP
#define FARIPA_HARNESS_HPP

/// Experiment orchestration: seeded end-to-end pipeline runs (source
/// generation, mixing, innovation recovery, ICA, dependence clustering,
/// scoring) plus aggregate box-plot statistics and JSON/CSV reporting.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "faripa/far.hpp"
#include "faripa/isa.hpp"
#include "faripa/rng.hpp"
#include "faripa/types.hpp"

namespace faripa::harness {

/// Five-number summary with outliers split off by the 1.5 IQR fence.
/// Quantiles use linear interpolation on the sorted sample: quantile q sits
/// at position q*(n-1), interpolated between the bracketing order statistics.
struct BoxStats {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
  double whisker_low = 0.0;   // smallest value inside the fence
  double whisker_high = 0.0;  // largest value inside the fence
  std::vector<double> outliers;
};

/// Throws ConfigError on an empty list and NumericError on non-finite input.
BoxStats boxplot_stats(std::vector<double> values);

struct KccaSettings {
  int subsample = 1000;
  double kappa = 0.1;
};

struct IcaSettings {
  std::string g = "tanh";  // "tanh" | "cube"
  double tol = 1e-6;
  int max_iter = 1000;
  int retries = 3;  // fresh random restarts when the fixed point stalls
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::string dataset;    // "smiley-like" | "d-geom" | "ikeda"
  std::vector<int> dims;  // per-component source dimensions (ikeda: fixed 2,2)
  long T = 0;             // samples kept after burn-in
  int p = 1;              // autoregression order
  double beta_c = 0.25;   // recursive kernel exponent is beta_c / (p * D)
  std::string estimator = "far-ipa";  // "far-ipa" | "ar-ipa"
  int runs = 10;
  std::uint64_t seed = 0;  // run r uses seed + r
  int burn_in = 100;
  int n_max = 5000;  // training-pair cap for the kernel stage
  bool loo = true;   // leave-one-out on in-sample regression queries
  KccaSettings kcca;
  IcaSettings ica;
  std::string cluster = "auto";  // "auto" (greedy) | "greedy" | "ncut"
  std::optional<int> ncut_groups;  // group count for ncut; inferred when absent
  bool debug_identity = false;  // identity mixing + pass-through stages

  /// Component dimensions in the canonical (ascending) generation order;
  /// supplies the ikeda default (2,2) when dims is empty.
  std::vector<int> component_dims() const;
  int total_dim() const;
  void validate() const;

  nlohmann::ordered_json to_json() const;
  static ExperimentConfig from_json(const nlohmann::ordered_json& j);
  static ExperimentConfig load(const std::string& path);
  void save(const std::string& path) const;
};

struct StageTimings {
  double generate = 0.0;
  double mixing = 0.0;
  double innovations = 0.0;
  double ica = 0.0;
  double dependence = 0.0;
  double cluster = 0.0;
  double assemble = 0.0;
  double total = 0.0;
};

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double amari = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> estimated_dims;
  isa::Partition partition;
  bool dims_correct = false;
  bool block_permutation = false;
  bool ica_converged = false;
  int ica_iterations = 0;
  int ica_attempts = 0;
  int innovation_fallbacks = 0;
  int train_size = 0;
  Eigen::MatrixXd G;
  StageTimings timings;
};

struct RunReport {
  ExperimentConfig config;
  std::vector<RunRecord> runs;
  int completed = 0;
  int failed = 0;
  std::vector<double> amari_values;  // completed runs, run order
  BoxStats amari_stats;              // defined when completed > 0

  double median_amari() const;  // NaN when no run completed

  /// Timings vary between identical reruns, so they are withheld by default;
  /// everything else is a pure function of the config.
  nlohmann::ordered_json to_json(bool include_timings = false) const;
  std::string to_json_text(bool include_timings = false) const;
  void save_json(const std::string& path, bool include_timings = true) const;

  /// One row per run: run, seed, status, amari, converged, wall time.
  void write_csv_summary(const std::string& path) const;
};

/// Haar-distributed random orthogonal mixing matrix (QR of a Gaussian
/// matrix with the R-diagonal signs folded in).
far::MixingSpec random_orthogonal(int D, Rng& rng);

/// Hidden sources for one run: ikeda trajectories, or a nonparametric
/// autoregression driven by centered smiley/geometric innovation samples.
TimeSeries build_sources(const ExperimentConfig& cfg, std::uint64_t run_seed);

RunReport run_experiment(const ExperimentConfig& cfg);

}  // namespace faripa::harness

#endif  // FARIPA_HARNESS_HPP
