#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spikereg/classifier.hpp"
#include "spikereg/neuron.hpp"
#include "spikereg/plasticity.hpp"
#include "spikereg/types.hpp"

namespace spikereg {

struct NetworkConfig {
  int channel_count = 14;
  int hidden_count = 200;
  LifParams<double> lif;
  StdpParams<double> stdp;
  IpRates<double> ip;
  RankOrderParams rank_order;
  std::uint64_t seed = 1;
  bool permute_inputs = true;
  int stats_bins = 0;  // 0 = ceil(sqrt(active neurons))

  // Excitatory/inhibitory input pair per channel.
  int input_count() const { return 2 * channel_count; }
  void validate() const;
};

enum class TrainingMode { StdpOnly, Ensemble };

std::string_view to_string(TrainingMode mode);

struct PruneReport {
  double threshold = 0;
  std::vector<int> pruned_indices;
  double pruned_fraction = 0;
  int surviving_count = 0;
};

/// Hidden-layer response to one sample under frozen dynamics.
struct Propagation {
  SpikeTimes hidden_raster;          // per hidden neuron
  std::vector<int> population_trace; // hidden spikes per timestep
  int window = 0;
};

struct InferResult {
  Label label = 0;
  double distance = 0;
  std::int64_t matched_sample = 0;
  bool low_confidence = false;  // no hidden neuron spiked
};

/// Everything needed to restore a network bit-for-bit.
struct TrainedModel {
  NetworkConfig config;
  WeightMatrix<double> synapses;
  std::vector<NeuronState<double>> neuron_states;
  std::vector<int> input_mapping;
  std::vector<OutputNeuron> gallery;
  std::int64_t training_steps = 0;
  std::optional<FiringStats> stats;
  std::optional<PruneReport> prune_report;
};

/// Feed-forward network: paired pass-through input layer, plastic LIF hidden
/// layer and an evolving rank-order output layer.
class Network {
public:
  /// Seeded initialisation: excitatory rows U[0, w_max], inhibitory rows
  /// U[w_min, 0], thresholds at v_init, optional seeded channel permutation.
  explicit Network(const NetworkConfig& config);

  static Network from_model(const TrainedModel& model);
  TrainedModel to_model() const;

  const NetworkConfig& config() const { return config_; }
  const WeightMatrix<double>& weights() const { return weights_; }
  std::span<const NeuronState<double>> neurons() const { return neurons_; }
  std::span<const int> input_mapping() const { return input_mapping_; }
  std::span<const OutputNeuron> gallery() const { return gallery_; }

  /// One pass over `samples` in seeded shuffled order. Weights, thresholds
  /// and spike counts persist across samples; membrane and refractory state
  /// are reset at the start of every sample.
  FiringStats train_unsupervised(std::span<const SpikeTrain> samples, TrainingMode mode);

  /// Evolves one output neuron per sample through the frozen hidden layer.
  std::span<const OutputNeuron> train_classifier(std::span<const SpikeTrain> samples,
                                                 std::span<const Label> labels);

  InferResult infer(const SpikeTrain& sample) const;

  /// Frozen simulation of one sample: no plasticity, no counting.
  Propagation propagate(const SpikeTrain& sample) const;

  bool trained() const { return training_steps_ > 0; }
  std::int64_t training_steps() const { return training_steps_; }
  const std::optional<FiringStats>& training_stats() const { return stats_; }
  /// Training-period activity restricted to spike counts (no traces).
  ActivityRecord training_counts() const;

  std::vector<std::uint8_t> active_mask() const;
  void set_active_mask(std::span<const std::uint8_t> mask);
  void restore_all_neurons();
  int active_count() const;

  const std::optional<PruneReport>& prune_report() const { return prune_report_; }
  void set_prune_report(std::optional<PruneReport> report) { prune_report_ = std::move(report); }

private:
  Network() = default;
  void check_sample(const SpikeTrain& sample) const;

  NetworkConfig config_;
  WeightMatrix<double> weights_;
  std::vector<NeuronState<double>> neurons_;
  std::vector<int> input_mapping_;
  std::vector<OutputNeuron> gallery_;
  std::int64_t training_steps_ = 0;
  std::optional<FiringStats> stats_;
  std::optional<PruneReport> prune_report_;
};

}  // namespace spikereg
