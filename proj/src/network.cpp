#include "spikereg/network.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "spikereg/error.hpp"
#include "spikereg/random.hpp"

namespace spikereg {

std::string_view to_string(TrainingMode mode) {
  return mode == TrainingMode::StdpOnly ? "stdp_only" : "ensemble";
}

void NetworkConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidConfig, why); };
  if (channel_count < 1) fail("channel_count must be >= 1");
  if (hidden_count < 1) fail("hidden_count must be >= 1");
  if (!lif.valid()) fail("LIF parameters invalid (need R*C > 0, dt > 0, t_refractory >= 0)");
  if (!stdp.valid()) fail("STDP parameters invalid (need tau > 0, w_min < w_max, A >= 0)");
  if (!ip.valid()) fail("IP rates must lie in [0, 1]");
  if (!rank_order.valid()) fail("rank-order parameters invalid (need 0 < mod < 1, drift >= 0)");
  if (stats_bins < 0) fail("stats_bins must be >= 0");
}

Network::Network(const NetworkConfig& config) : config_(config) {
  config_.validate();
  const int inputs = config_.input_count();
  const int hidden = config_.hidden_count;

  Rng weight_rng(derive_seed(config_.seed, stream::kWeights));
  std::uniform_real_distribution<double> excitatory(0.0, config_.stdp.w_max);
  std::uniform_real_distribution<double> inhibitory(config_.stdp.w_min, 0.0);
  weights_.resize(inputs, hidden);
  for (int j = 0; j < inputs; ++j)
    for (int i = 0; i < hidden; ++i)
      weights_(j, i) = (j % 2 == 0) ? excitatory(weight_rng) : inhibitory(weight_rng);

  input_mapping_.resize(config_.channel_count);
  std::iota(input_mapping_.begin(), input_mapping_.end(), 0);
  if (config_.permute_inputs) {
    Rng map_rng(derive_seed(config_.seed, stream::kInputMapping));
    std::shuffle(input_mapping_.begin(), input_mapping_.end(), map_rng);
  }

  neurons_.assign(hidden, NeuronState<double>::at_rest(config_.lif));
}

void Network::check_sample(const SpikeTrain& sample) const {
  if (sample.rows() != config_.channel_count)
    throw Error(ErrorCode::ShapeMismatch, "sample has " + std::to_string(sample.rows()) +
                                              " channels, network expects " +
                                              std::to_string(config_.channel_count));
  if (sample.cols() < 1) throw Error(ErrorCode::ShapeMismatch, "sample has no timepoints");
}

namespace {

// Row of the input layer fed by a channel event: 2k excitatory, 2k+1 inhibitory.
inline int input_row(int pair, std::int8_t event) { return 2 * pair + (event > 0 ? 0 : 1); }

}  // namespace

FiringStats Network::train_unsupervised(std::span<const SpikeTrain> samples, TrainingMode mode) {
  for (const auto& s : samples) check_sample(s);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng order_rng(derive_seed(config_.seed, stream::kSampleOrder));
  std::shuffle(order.begin(), order.end(), order_rng);

  const int hidden = config_.hidden_count;
  const int n_active = active_count();
  const auto& lif = config_.lif;

  ActivityRecord record;
  record.population_trace.reserve(samples.size());
  Vector<double> current(hidden);
  SpikeTimes pre(config_.input_count());
  SpikeTimes post(hidden);

  for (std::size_t idx : order) {
    const SpikeTrain& sample = samples[idx];
    const int window = static_cast<int>(sample.cols());
    for (auto& n : neurons_) {
      n.v = lif.v_rest;
      n.refractory_remaining = 0;
    }
    for (auto& p : pre) p.clear();
    for (auto& p : post) p.clear();
    std::vector<int> trace(window, 0);

    for (int t = 0; t < window; ++t) {
      current.setZero();
      for (int c = 0; c < config_.channel_count; ++c) {
        const std::int8_t e = sample(c, t);
        if (e == 0) continue;
        const int j = input_row(input_mapping_[c], e);
        current += weights_.row(j).transpose();
        pre[j].push_back(t);
      }
      for (int i = 0; i < hidden; ++i) {
        auto& n = neurons_[i];
        if (!n.active) continue;
        const bool spiked = lif_step(n, current[i], lif);
        if (spiked) {
          post[i].push_back(t);
          ++trace[t];
        }
        if (mode == TrainingMode::Ensemble) ip_update(n, spiked, config_.ip, n_active, lif);
      }
    }
    apply_stdp(weights_, pre, post, config_.stdp);
    training_steps_ += window;
    record.population_trace.push_back(std::move(trace));
  }

  record.spike_counts.resize(hidden);
  record.active = active_mask();
  for (int i = 0; i < hidden; ++i) record.spike_counts[i] = neurons_[i].spike_count;
  record.total_steps = training_steps_;
  if (training_steps_ == 0) {
    // Nothing to learn from; report a silent network over one nominal step.
    record.total_steps = 1;
  }
  stats_ = compute_firing_stats(record, config_.stats_bins);
  return *stats_;
}

Propagation Network::propagate(const SpikeTrain& sample) const {
  check_sample(sample);
  const int hidden = config_.hidden_count;
  const int window = static_cast<int>(sample.cols());
  const auto& lif = config_.lif;

  std::vector<NeuronState<double>> state = neurons_;
  for (auto& n : state) {
    n.v = lif.v_rest;
    n.refractory_remaining = 0;
  }
  Propagation out;
  out.window = window;
  out.hidden_raster.assign(hidden, {});
  out.population_trace.assign(window, 0);
  Vector<double> current(hidden);
  for (int t = 0; t < window; ++t) {
    current.setZero();
    for (int c = 0; c < config_.channel_count; ++c) {
      const std::int8_t e = sample(c, t);
      if (e != 0) current += weights_.row(input_row(input_mapping_[c], e)).transpose();
    }
    for (int i = 0; i < hidden; ++i) {
      if (!state[i].active) continue;
      if (lif_step(state[i], current[i], lif)) {
        out.hidden_raster[i].push_back(t);
        ++out.population_trace[t];
      }
    }
  }
  return out;
}

std::span<const OutputNeuron> Network::train_classifier(std::span<const SpikeTrain> samples,
                                                        std::span<const Label> labels) {
  if (samples.size() != labels.size())
    throw Error(ErrorCode::LabelCountMismatch, std::to_string(samples.size()) + " samples but " +
                                                   std::to_string(labels.size()) + " labels");
  for (const auto& s : samples) check_sample(s);
  gallery_.clear();
  gallery_.reserve(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Propagation p = propagate(samples[k]);
    gallery_.push_back(evolve_output_neuron(p.hidden_raster, p.window, labels[k], config_.rank_order,
                                            static_cast<std::int64_t>(k))
                           .neuron);
  }
  return gallery_;
}

InferResult Network::infer(const SpikeTrain& sample) const {
  if (gallery_.empty()) throw Error(ErrorCode::NotTrained, "classifier has not been trained");
  const Propagation p = propagate(sample);
  const EvolveResult evolved =
      evolve_output_neuron(p.hidden_raster, p.window, 0, config_.rank_order);
  const std::vector<std::uint8_t> mask = active_mask();
  const Prediction pred = classify(evolved.neuron.weights, gallery_, mask);
  return {pred.label, pred.distance, pred.sample_id, evolved.empty_raster};
}

ActivityRecord Network::training_counts() const {
  ActivityRecord r;
  r.spike_counts.reserve(neurons_.size());
  for (const auto& n : neurons_) r.spike_counts.push_back(n.spike_count);
  r.total_steps = training_steps_;
  return r;
}

std::vector<std::uint8_t> Network::active_mask() const {
  std::vector<std::uint8_t> m(neurons_.size());
  for (std::size_t i = 0; i < neurons_.size(); ++i) m[i] = neurons_[i].active ? 1 : 0;
  return m;
}

void Network::set_active_mask(std::span<const std::uint8_t> mask) {
  if (mask.size() != neurons_.size())
    throw Error(ErrorCode::ShapeMismatch, "mask length differs from hidden layer size");
  for (std::size_t i = 0; i < neurons_.size(); ++i) neurons_[i].active = mask[i] != 0;
}

void Network::restore_all_neurons() {
  for (auto& n : neurons_) n.active = true;
  prune_report_.reset();
}

int Network::active_count() const {
  return static_cast<int>(
      std::count_if(neurons_.begin(), neurons_.end(), [](const auto& n) { return n.active; }));
}

TrainedModel Network::to_model() const {
  TrainedModel m;
  m.config = config_;
  m.synapses = weights_;
  m.neuron_states = neurons_;
  m.input_mapping = input_mapping_;
  m.gallery = gallery_;
  m.training_steps = training_steps_;
  m.stats = stats_;
  m.prune_report = prune_report_;
  return m;
}

Network Network::from_model(const TrainedModel& model) {
  model.config.validate();
  const auto hidden = static_cast<std::size_t>(model.config.hidden_count);
  if (model.synapses.rows() != model.config.input_count() ||
      model.synapses.cols() != model.config.hidden_count || model.neuron_states.size() != hidden ||
      model.input_mapping.size() != static_cast<std::size_t>(model.config.channel_count))
    throw Error(ErrorCode::ShapeMismatch, "model parts disagree with its configuration");
  for (const auto& g : model.gallery)
    if (g.weights.size() != model.config.hidden_count)
      throw Error(ErrorCode::ShapeMismatch, "gallery vector length differs from hidden layer");
  Network net;
  net.config_ = model.config;
  net.weights_ = model.synapses;
  net.neurons_ = model.neuron_states;
  net.input_mapping_ = model.input_mapping;
  net.gallery_ = model.gallery;
  net.training_steps_ = model.training_steps;
  net.stats_ = model.stats;
  net.prune_report_ = model.prune_report;
  return net;
}

}  // namespace spikereg
