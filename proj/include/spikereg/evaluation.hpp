#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spikereg/network.hpp"
#include "spikereg/types.hpp"

namespace spikereg {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  Matrix<std::int64_t> counts;

  explicit ConfusionMatrix(int classes = 0) : counts(Matrix<std::int64_t>::Zero(classes, classes)) {}
  void add(Label truth, Label predicted) { ++counts(truth, predicted); }
  std::int64_t total() const { return counts.sum(); }
  int classes() const { return static_cast<int>(counts.rows()); }
};

enum class F1Average { Macro, Weighted, Binary };

struct Metrics {
  double accuracy = 0;
  double f1 = 0;
  double kappa = 0;
};

/// Accuracy, F1 (per-class F1 is 0 when precision + recall = 0) and Cohen's
/// kappa (0 when chance agreement is 1). `positive` is used by Binary only.
Metrics compute_metrics(const ConfusionMatrix& cm, F1Average average = F1Average::Macro,
                        int positive = 1);

enum class Approach { StdpOnly, Ensemble, EnsemblePruned };

std::string_view to_string(Approach approach);
Approach approach_from_string(std::string_view name);

struct PipelineOptions {
  NetworkConfig network;
  Approach approach = Approach::Ensemble;
  // Fixed pruning threshold; when absent the lowest suggested one is used.
  std::optional<double> prune_threshold;
  double gap_factor = 3.0;
  F1Average f1_average = F1Average::Macro;
};

struct PipelineResult {
  ConfusionMatrix confusion;
  Metrics metrics;
  FiringStats train_stats;
  std::optional<PruneReport> prune;
  bool prune_refused = false;  // threshold exceeded every rate; network left unpruned
  std::int64_t low_confidence = 0;  // test samples with a silent hidden layer
};

/// Fresh network (seeded with `seed`), unsupervised pass, classifier,
/// optional pruning, then inference over the test samples.
PipelineResult run_pipeline(std::span<const SpikeTrain> train, std::span<const Label> train_labels,
                            std::span<const SpikeTrain> test, std::span<const Label> test_labels,
                            int classes, const PipelineOptions& options, std::uint64_t seed,
                            Network* trained_out = nullptr);

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  Metrics metrics;
  double mean_rate = 0;
  double entropy_bits = 0;
  double active_fraction = 0;
  std::optional<double> prune_threshold;
  double pruned_fraction = 0;
  bool prune_refused = false;
  int train_count = 0;
  int test_count = 0;
};

RunRecord make_run_record(int run, std::uint64_t seed, const PipelineResult& result,
                          std::size_t train_count, std::size_t test_count);

struct Summary {
  double mean = 0;
  double std = 0;  // sample standard deviation, 0 for a single value
  double min = 0;
  double max = 0;
  double range() const { return max - min; }
};

Summary summarize(std::span<const double> values);

struct EvalReport {
  Approach approach = Approach::Ensemble;
  std::string protocol;  // "kfold" or "split"
  std::vector<RunRecord> runs;
  Summary accuracy, f1, kappa, mean_rate;

  /// Recomputes the aggregates from `runs`.
  void aggregate();
};

/// Stratified fold assignment: classes are shuffled individually, laid out
/// class after class and dealt round-robin, so every fold gets within one
/// sample of its share of each class.
std::vector<int> stratified_folds(std::span<const Label> labels, int k, std::uint64_t seed);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per class, round(train_fraction * class size) samples go to training.
SplitIndices stratified_split(std::span<const Label> labels, double train_fraction,
                              std::uint64_t seed);

/// Seed used by repeat `r` of run_split_repeats.
std::uint64_t repeat_seed(std::uint64_t seed, int r);

EvalReport run_kfold(std::span<const SpikeTrain> samples, std::span<const Label> labels, int classes,
                     const PipelineOptions& options, int k, std::uint64_t seed, int threads = 1);

EvalReport run_split_repeats(std::span<const SpikeTrain> samples, std::span<const Label> labels,
                             int classes, const PipelineOptions& options, double train_fraction,
                             int repeats, std::uint64_t seed, int threads = 1);

struct TTestResult {
  double t = 0;
  double p = 1;
  double df = 0;
};

/// Welch's unequal-variance two-sample t-test, two-sided p-value.
TTestResult two_sample_t(std::span<const double> a, std::span<const double> b);

}  // namespace spikereg
