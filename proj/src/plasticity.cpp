#include "spikereg/plasticity.hpp"

#include <cmath>
#include <string>

#include "spikereg/parallel.hpp"

namespace spikereg {

int default_bin_count(int active_neurons) {
  if (active_neurons <= 1) return 1;
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(active_neurons))));
}

FiringStats compute_firing_stats(const ActivityRecord& record, int bin_count) {
  if (record.total_steps < 1) throw Error(ErrorCode::ZeroSteps, "total_steps must be >= 1");
  const auto n = static_cast<Eigen::Index>(record.spike_counts.size());
  if (!record.active.empty() && static_cast<Eigen::Index>(record.active.size()) != n)
    throw Error(ErrorCode::ShapeMismatch, "activity mask does not match neuron count");
  auto is_active = [&](Eigen::Index i) { return record.active.empty() || record.active[i] != 0; };

  FiringStats st;
  st.total_steps = record.total_steps;
  st.per_neuron_rate.resize(n);
  const double steps = static_cast<double>(record.total_steps);
  for (Eigen::Index i = 0; i < n; ++i)
    st.per_neuron_rate[i] = static_cast<double>(record.spike_counts[i]) / steps;

  std::vector<double> rates;
  rates.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (is_active(i)) rates.push_back(st.per_neuron_rate[i]);
  st.active_count = static_cast<int>(rates.size());

  const int bins = bin_count > 0 ? bin_count : default_bin_count(st.active_count);
  double max_rate = 0;
  double sum = 0;
  int firing = 0;
  for (double r : rates) {
    max_rate = std::max(max_rate, r);
    sum += r;
    firing += r > 0 ? 1 : 0;
  }
  if (!rates.empty()) {
    st.mean_rate = sum / static_cast<double>(rates.size());
    st.active_fraction = static_cast<double>(firing) / static_cast<double>(rates.size());
  }

  st.bin_edges.resize(bins + 1);
  for (int k = 0; k <= bins; ++k) st.bin_edges[k] = max_rate * k / bins;
  std::vector<std::int64_t> counts(bins, 0);
  for (double r : rates) {
    // Bin k holds edges[k] <= r < edges[k+1]; the last bin is closed.
    auto it = std::upper_bound(st.bin_edges.begin() + 1, st.bin_edges.end() - 1, r);
    ++counts[it - (st.bin_edges.begin() + 1)];
  }
  st.rate_pdf.assign(bins, 0.0);
  if (!rates.empty()) {
    for (int k = 0; k < bins; ++k)
      st.rate_pdf[k] = static_cast<double>(counts[k]) / static_cast<double>(rates.size());
  }
  for (double p : st.rate_pdf)
    if (p > 0) st.entropy_bits -= p * std::log2(p);
  if (st.entropy_bits < 0) st.entropy_bits = 0;  // -0.0 from a single full bin

  for (const auto& segment : record.population_trace) {
    std::int64_t run = 0;
    for (int spikes : segment) {
      if (spikes > 0) {
        run += spikes;
      } else if (run > 0) {
        ++st.avalanche_sizes[run];
        run = 0;
      }
    }
    if (run > 0) ++st.avalanche_sizes[run];
  }
  return st;
}

IpRates<double> select_ip_rates(std::span<const TuningPoint> table) {
  if (table.empty()) throw Error(ErrorCode::EmptyGrid, "no tuning points");
  double best_activation = table.front().active_fraction;
  for (const auto& pt : table) best_activation = std::max(best_activation, pt.active_fraction);

  const TuningPoint* best = nullptr;
  for (const auto& pt : table) {
    if (pt.active_fraction < best_activation - 1e-6) continue;
    if (best == nullptr || pt.entropy_bits < best->entropy_bits) {
      best = &pt;
      continue;
    }
    if (pt.entropy_bits == best->entropy_bits) {
      const auto& a = pt.rates;
      const auto& b = best->rates;
      if (a.theta_pos < b.theta_pos || (a.theta_pos == b.theta_pos && a.theta_neg < b.theta_neg))
        best = &pt;
    }
  }
  return best->rates;
}

TuningResult tune_ip_rates(const TrainCallback& train, std::span<const double> pos_grid,
                           std::span<const double> neg_grid, int threads) {
  if (pos_grid.empty() || neg_grid.empty())
    throw Error(ErrorCode::EmptyGrid, "IP tuning grids must be non-empty");
  auto in_range = [](double v) { return v >= 1e-10 && v <= 1.0; };
  for (double v : pos_grid)
    if (!in_range(v)) throw Error(ErrorCode::InvalidConfig, "theta_pos grid value outside [1e-10, 1]");
  for (double v : neg_grid)
    if (!in_range(v)) throw Error(ErrorCode::InvalidConfig, "theta_neg grid value outside [1e-10, 1]");

  TuningResult result;
  result.table.resize(pos_grid.size() * neg_grid.size());
  for (std::size_t a = 0; a < pos_grid.size(); ++a)
    for (std::size_t b = 0; b < neg_grid.size(); ++b)
      result.table[a * neg_grid.size() + b].rates = {pos_grid[a], neg_grid[b]};

  parallel_for(result.table.size(), threads, [&](std::size_t k) {
    auto& pt = result.table[k];
    FiringStats st;
    try {
      st = train(pt.rates);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::CallbackFailure, std::string("training callback failed: ") + e.what());
    }
    pt.active_fraction = st.active_fraction;
    pt.entropy_bits = st.entropy_bits;
  });
  result.best = select_ip_rates(result.table);
  return result;
}

}  // namespace spikereg
