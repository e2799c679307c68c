#pragma once

#include <span>
#include <vector>

#include "spikereg/network.hpp"
#include "spikereg/plasticity.hpp"

namespace spikereg {

/// Soft-deactivates every hidden neuron whose training firing rate
/// (spike count / training steps) is strictly below `threshold`. The mask is
/// always recomputed from the full hidden layer, so repeated calls with the
/// same threshold give the same result. Reads spike counts only.
PruneReport prune_by_rate(Network& network, double threshold);

/// Which neurons a threshold would prune, without touching any network.
PruneReport plan_pruning(std::span<const double> rates, double threshold);

struct ThresholdSuggestion {
  std::vector<double> thresholds;
  bool fewer_clusters_than_k = false;
};

/// 1-D gap clustering of the sorted rates: a new cluster starts wherever the
/// gap to the previous rate exceeds gap_factor * median gap. Suggestion c is
/// the lowest rate of cluster c+1, so pruning at it removes clusters 0..c.
/// With a single cluster the only suggestion is its lowest rate.
ThresholdSuggestion suggest_thresholds(std::span<const double> rates, int k,
                                       double gap_factor = 3.0);
ThresholdSuggestion suggest_thresholds(const FiringStats& stats, int k, double gap_factor = 3.0);

}  // namespace spikereg
