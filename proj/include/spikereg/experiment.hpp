#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spikereg/data.hpp"
#include "spikereg/evaluation.hpp"
#include "spikereg/snapshot.hpp"

namespace spikereg {

inline constexpr std::string_view kExperimentFormat = "spikereg-experiment";
inline constexpr int kExperimentVersion = 1;

struct DatasetSource {
  std::optional<std::filesystem::path> manifest;  // relative paths resolve against the config file
  SyntheticSpec synthetic;                        // used when manifest is absent
};

struct EvaluationPlan {
  int kfold = 5;  // 0 disables cross-validation
  double train_fraction = 0.7;
  int repeats = 30;
  F1Average f1_average = F1Average::Macro;
};

struct TuningPlan {
  bool enabled = false;
  std::vector<double> theta_pos_grid;
  std::vector<double> theta_neg_grid;
};

struct PruningPlan {
  std::vector<double> thresholds;  // empty: suggest `suggest_k` from the firing rates
  int suggest_k = 3;
  double gap_factor = 3.0;
};

/// Everything a run needs. Defaults reproduce the reference hyper-parameters
/// on a 3-class, 14-channel synthetic dataset.
struct ExperimentConfig {
  std::uint64_t seed = 1;
  DatasetSource dataset;
  int reduce_window = 1;
  double aer_factor = kDefaultAerFactor;
  AerMode aer_mode = AerMode::Symmetric;
  NetworkConfig network;
  std::vector<Approach> approaches{Approach::StdpOnly, Approach::Ensemble, Approach::EnsemblePruned};
  EvaluationPlan evaluation;
  TuningPlan tuning;
  PruningPlan pruning;
};

json to_json(const ExperimentConfig& config);
/// Strict: unknown keys, wrong types and invalid values throw InvalidConfig.
ExperimentConfig experiment_config_from_json(const json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Dataset after loading or generation, window reduction and AER encoding.
struct PreparedData {
  Dataset analog;
  std::vector<SpikeTrain> encoded;
};

PreparedData prepare_data(const ExperimentConfig& config);

using ProgressFn = std::function<void(const std::string&)>;

struct ExperimentOutcome {
  std::vector<EvalReport> cv_reports;     // one per approach (empty when kfold = 0)
  std::vector<EvalReport> split_reports;  // one per approach
  std::optional<TuningResult> tuning;
  std::vector<std::string> completed_stages;
};

/// Full pipeline: optional IP tuning, per approach k-fold CV on the training
/// partition plus split testing for every repeat, pruning sweep, and the
/// result files. Output is a pure function of the config.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                 int threads = 1, const ProgressFn& progress = {});

/// IP-rate grid search on the training partition of repeat 0.
TuningResult run_tuning(const ExperimentConfig& config, const PreparedData& data, int threads = 1);

void write_tuning_curve(const std::filesystem::path& path, const TuningResult& result);
void write_rate_histogram(const std::filesystem::path& path, const FiringStats& stats);
void write_avalanches(const std::filesystem::path& path, const FiringStats& stats);

/// Propagates samples through a frozen network; writes the raster event list
/// (sample_id,neuron_id,timestep) and returns the activity statistics.
FiringStats write_raster(const std::filesystem::path& path, const Network& network,
                         std::span<const SpikeTrain> samples);

}  // namespace spikereg
