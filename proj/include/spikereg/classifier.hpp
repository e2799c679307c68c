#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spikereg/types.hpp"

namespace spikereg {

/// Which timesteps and neurons the per-step drift applies to.
enum class DriftScope {
  // Neurons that spiked, from their first spike to the end of the window.
  FromFirstSpike,
  // Neurons that spiked, over the whole window.
  WholeWindow,
  // Every neuron over the whole window (silent neurons drift negative).
  AllNeurons,
};

struct RankOrderParams {
  double alpha = 1.0;
  double mod = 0.8;
  double drift = 0.001;
  DriftScope scope = DriftScope::FromFirstSpike;

  bool valid() const { return mod > 0 && mod < 1 && drift >= 0; }
};

struct OutputNeuron {
  Vector<double> weights;  // one entry per hidden neuron, pruned slots included
  Label label = 0;
  std::int64_t sample_id = 0;
};

struct EvolveResult {
  OutputNeuron neuron;
  bool empty_raster = false;  // nothing spiked; weights are all zero
};

/// Rank-order initiation (alpha * mod^rank by first-spike time, ties by
/// neuron index) followed by +drift on spike steps and -drift otherwise.
/// `window` is the sample length in timesteps.
EvolveResult evolve_output_neuron(const SpikeTimes& hidden_raster, int window, Label label,
                                  const RankOrderParams& params, std::int64_t sample_id = 0);

struct Prediction {
  Label label = 0;
  double distance = 0;
  std::int64_t sample_id = 0;  // matched gallery neuron
};

/// Nearest gallery neuron in Euclidean distance; ties go to the lowest
/// sample_id. With a mask, dimensions whose entry is 0 are ignored.
Prediction classify(const Vector<double>& test, std::span<const OutputNeuron> gallery,
                    std::span<const std::uint8_t> mask = {});

}  // namespace spikereg
