#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "spikereg/error.hpp"
#include "spikereg/neuron.hpp"
#include "spikereg/types.hpp"

namespace spikereg {

template <typename Scalar = double>
struct StdpParams {
  Scalar a_pos = Scalar(0.001);
  Scalar a_neg = Scalar(0.001);
  Scalar tau_pos = Scalar(10);
  Scalar tau_neg = Scalar(10);
  Scalar w_max = Scalar(0.1);
  Scalar w_min = Scalar(-0.1);

  bool valid() const {
    return tau_pos > 0 && tau_neg > 0 && w_min < w_max && a_pos >= 0 && a_neg >= 0;
  }
};

/// Pair-based STDP kernel. delta_t = t_post - t_pre; simultaneous spikes are
/// neutral.
template <typename Scalar>
Scalar stdp_window(int delta_t, const StdpParams<Scalar>& p) {
  if (delta_t > 0) return p.a_pos * std::exp(-static_cast<Scalar>(delta_t) / p.tau_pos);
  if (delta_t < 0) return -p.a_neg * std::exp(static_cast<Scalar>(delta_t) / p.tau_neg);
  return Scalar(0);
}

/// stdp_window tabulated over [-span, span].
template <typename Scalar>
class StdpKernel {
public:
  StdpKernel(const StdpParams<Scalar>& p, int span) : span_(span), table_(2 * span + 1) {
    for (int d = -span; d <= span; ++d) table_[d + span] = stdp_window(d, p);
  }

  Scalar operator()(int delta_t) const { return table_[delta_t + span_]; }
  int span() const { return span_; }

private:
  int span_;
  std::vector<Scalar> table_;
};

/// All-to-all STDP over one sample window. For every synapse j -> i the
/// weight change sums the kernel over post spikes (outer) and pre spikes
/// (inner) in ascending order, then the weight is clamped to [w_min, w_max].
/// Rows of `weights` are presynaptic (input) neurons, columns postsynaptic.
template <typename Scalar>
void apply_stdp(WeightMatrix<Scalar>& weights, const SpikeTimes& pre, const SpikeTimes& post,
                const StdpParams<Scalar>& p) {
  if (static_cast<Eigen::Index>(pre.size()) != weights.rows() ||
      static_cast<Eigen::Index>(post.size()) != weights.cols())
    throw Error(ErrorCode::ShapeMismatch, "spike lists do not match synapse matrix dimensions");

  int last = 0;
  for (const auto& s : pre)
    if (!s.empty()) last = std::max(last, std::abs(s.back()));
  for (const auto& s : post)
    if (!s.empty()) last = std::max(last, std::abs(s.back()));
  const StdpKernel<Scalar> kernel(p, 2 * last);

  for (Eigen::Index i = 0; i < weights.cols(); ++i) {
    const auto& post_i = post[i];
    if (post_i.empty()) continue;
    for (Eigen::Index j = 0; j < weights.rows(); ++j) {
      const auto& pre_j = pre[j];
      if (pre_j.empty()) continue;
      Scalar dw = 0;
      for (int tm : post_i)
        for (int tn : pre_j) dw += kernel(tm - tn);
      weights(j, i) = std::clamp(weights(j, i) + dw, p.w_min, p.w_max);
    }
  }
}

/// Spiking activity gathered over a simulation period.
struct ActivityRecord {
  std::vector<std::int64_t> spike_counts;  // per hidden neuron
  std::vector<std::uint8_t> active;        // empty means every neuron active
  // Network-wide spike totals per timestep, one segment per sample window.
  std::vector<std::vector<int>> population_trace;
  std::int64_t total_steps = 0;
};

struct FiringStats {
  Vector<double> per_neuron_rate;   // spikes per timestep, every neuron
  std::vector<double> bin_edges;    // bin_count + 1 edges over [0, max rate]
  std::vector<double> rate_pdf;     // probability mass per bin, active neurons
  double entropy_bits = 0;
  double active_fraction = 0;
  double mean_rate = 0;             // over active neurons
  std::map<std::int64_t, std::int64_t> avalanche_sizes;  // size -> occurrences
  std::int64_t total_steps = 0;
  int active_count = 0;
};

/// Bin count used when none is requested: ceil(sqrt(active neurons)).
int default_bin_count(int active_neurons);

/// Rates, rate histogram, Shannon entropy (bits), activation fraction and
/// avalanche sizes. bin_count = 0 selects default_bin_count.
FiringStats compute_firing_stats(const ActivityRecord& record, int bin_count = 0);

struct TuningPoint {
  IpRates<double> rates;
  double active_fraction = 0;
  double entropy_bits = 0;
};

struct TuningResult {
  IpRates<double> best;
  std::vector<TuningPoint> table;  // grid order: theta_pos outer, theta_neg inner
};

using TrainCallback = std::function<FiringStats(const IpRates<double>&)>;

/// Evaluates `train` over the Cartesian grid and picks, among the points whose
/// activation is within 1e-6 of the best, the one with least entropy. Ties go
/// to the smallest theta_pos, then the smallest theta_neg.
TuningResult tune_ip_rates(const TrainCallback& train, std::span<const double> pos_grid,
                           std::span<const double> neg_grid, int threads = 1);

/// Selection rule of tune_ip_rates applied to an already evaluated table.
IpRates<double> select_ip_rates(std::span<const TuningPoint> table);

}  // namespace spikereg
