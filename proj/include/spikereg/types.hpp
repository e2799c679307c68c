#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace spikereg {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Input -> hidden synapses, one row per input neuron. Row-major so that the
// currents injected by one presynaptic spike are a contiguous row.
template <typename Scalar>
using WeightMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Analogue recording, channels x timepoints (microvolts).
using AnalogSample = Matrix<double>;

/// Ternary event matrix, channels x timepoints, entries in {-1, 0, +1}.
using SpikeTrain = Matrix<std::int8_t>;

/// Per-neuron ascending spike times (timesteps within one sample window).
using SpikeTimes = std::vector<std::vector<int>>;

using Label = int;

}  // namespace spikereg
