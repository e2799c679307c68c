#include "spikereg/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spikereg/error.hpp"

namespace spikereg {

EvolveResult evolve_output_neuron(const SpikeTimes& hidden_raster, int window, Label label,
                                  const RankOrderParams& params, std::int64_t sample_id) {
  const auto n = static_cast<Eigen::Index>(hidden_raster.size());
  EvolveResult out;
  out.neuron.label = label;
  out.neuron.sample_id = sample_id;
  out.neuron.weights = Vector<double>::Zero(n);

  std::vector<Eigen::Index> fired;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!hidden_raster[i].empty()) fired.push_back(i);
  std::stable_sort(fired.begin(), fired.end(), [&](Eigen::Index a, Eigen::Index b) {
    return hidden_raster[a].front() < hidden_raster[b].front();
  });

  double w = params.alpha;
  for (Eigen::Index i : fired) {
    out.neuron.weights[i] = w;
    w *= params.mod;
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& times = hidden_raster[i];
    int from = 0;
    if (times.empty()) {
      if (params.scope != DriftScope::AllNeurons) continue;
    } else if (params.scope == DriftScope::FromFirstSpike) {
      from = times.front();
    }
    // Spike times are distinct steps inside the window.
    const auto spikes = static_cast<int>(std::count_if(
        times.begin(), times.end(), [&](int t) { return t >= from && t < window; }));
    const int silent = std::max(0, window - from) - spikes;
    out.neuron.weights[i] += params.drift * spikes - params.drift * silent;
  }
  out.empty_raster = fired.empty();
  return out;
}

Prediction classify(const Vector<double>& test, std::span<const OutputNeuron> gallery,
                    std::span<const std::uint8_t> mask) {
  if (gallery.empty()) throw Error(ErrorCode::EmptyGallery, "classifier gallery is empty");
  if (!mask.empty() && static_cast<Eigen::Index>(mask.size()) != test.size())
    throw Error(ErrorCode::DimensionMismatch, "mask length differs from test vector");

  const OutputNeuron* best = nullptr;
  double best_sq = 0;
  for (const auto& g : gallery) {
    if (g.weights.size() != test.size())
      throw Error(ErrorCode::DimensionMismatch, "gallery vector length differs from test vector");
    double sq = 0;
    for (Eigen::Index k = 0; k < test.size(); ++k) {
      if (!mask.empty() && mask[k] == 0) continue;
      const double d = g.weights[k] - test[k];
      sq += d * d;
    }
    if (best == nullptr || sq < best_sq || (sq == best_sq && g.sample_id < best->sample_id)) {
      best = &g;
      best_sq = sq;
    }
  }
  return {best->label, std::sqrt(best_sq), best->sample_id};
}

}  // namespace spikereg
