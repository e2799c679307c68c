#include "spikereg/pruning.hpp"

#include <algorithm>
#include <string>

#include "spikereg/error.hpp"

namespace spikereg {

PruneReport plan_pruning(std::span<const double> rates, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorCode::InvalidThreshold, "pruning threshold must lie in [0, 1]");
  PruneReport report;
  report.threshold = threshold;
  for (std::size_t i = 0; i < rates.size(); ++i)
    if (rates[i] < threshold) report.pruned_indices.push_back(static_cast<int>(i));
  report.surviving_count = static_cast<int>(rates.size() - report.pruned_indices.size());
  if (report.surviving_count == 0)
    throw Error(ErrorCode::AllNeuronsPruned,
                "threshold " + std::to_string(threshold) + " exceeds every firing rate");
  report.pruned_fraction =
      static_cast<double>(report.pruned_indices.size()) / static_cast<double>(rates.size());
  return report;
}

PruneReport prune_by_rate(Network& network, double threshold) {
  if (!network.trained())
    throw Error(ErrorCode::NotTrained, "pruning needs spike counts from a training pass");
  const ActivityRecord counts = network.training_counts();
  std::vector<double> rates(counts.spike_counts.size());
  for (std::size_t i = 0; i < rates.size(); ++i)
    rates[i] = static_cast<double>(counts.spike_counts[i]) / static_cast<double>(counts.total_steps);

  PruneReport report = plan_pruning(rates, threshold);
  std::vector<std::uint8_t> mask(rates.size(), 1);
  for (int i : report.pruned_indices) mask[i] = 0;
  network.set_active_mask(mask);
  network.set_prune_report(report);
  return report;
}

ThresholdSuggestion suggest_thresholds(std::span<const double> rates, int k, double gap_factor) {
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
  ThresholdSuggestion out;
  if (rates.empty()) {
    out.fewer_clusters_than_k = true;
    return out;
  }
  std::vector<double> sorted(rates.begin(), rates.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> gaps;
  for (std::size_t i = 1; i < sorted.size(); ++i) gaps.push_back(sorted[i] - sorted[i - 1]);
  double median = 0;
  if (!gaps.empty()) {
    std::vector<double> g = gaps;
    const std::size_t mid = g.size() / 2;
    std::nth_element(g.begin(), g.begin() + mid, g.end());
    median = g[mid];
    if (g.size() % 2 == 0) {
      const double lower = *std::max_element(g.begin(), g.begin() + mid);
      median = 0.5 * (median + lower);
    }
  }
  const double cut = gap_factor * median;

  // Boundaries: index of the first element of each cluster after the first.
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (gaps[i] > cut) starts.push_back(i + 1);

  // Cluster c is pruned by the lowest rate of cluster c+1. The top cluster
  // is never offered unless it is the only one; then its lowest rate (which
  // prunes nothing) is returned.
  const std::size_t useful = std::max<std::size_t>(1, starts.size());
  const std::size_t take = std::min<std::size_t>(useful, static_cast<std::size_t>(k));
  for (std::size_t c = 0; c < take; ++c)
    out.thresholds.push_back(starts.empty() ? sorted.front() : sorted[starts[c]]);
  out.fewer_clusters_than_k = useful < static_cast<std::size_t>(k);
  return out;
}

ThresholdSuggestion suggest_thresholds(const FiringStats& stats, int k, double gap_factor) {
  std::vector<double> rates(stats.per_neuron_rate.data(),
                            stats.per_neuron_rate.data() + stats.per_neuron_rate.size());
  return suggest_thresholds(rates, k, gap_factor);
}

}  // namespace spikereg
