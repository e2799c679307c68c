#include "spikereg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "spikereg/error.hpp"
#include "spikereg/parallel.hpp"
#include "spikereg/pruning.hpp"
#include "spikereg/random.hpp"

namespace spikereg {

Metrics compute_metrics(const ConfusionMatrix& cm, F1Average average, int positive) {
  const double total = static_cast<double>(cm.total());
  if (cm.classes() == 0 || total <= 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");
  const int k = cm.classes();
  const auto& c = cm.counts;

  Metrics m;
  m.accuracy = static_cast<double>(c.trace()) / total;

  std::vector<double> f1(k), support(k);
  for (int i = 0; i < k; ++i) {
    const double tp = static_cast<double>(c(i, i));
    const double predicted = static_cast<double>(c.col(i).sum());
    const double actual = static_cast<double>(c.row(i).sum());
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = actual > 0 ? tp / actual : 0.0;
    f1[i] = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
    support[i] = actual;
  }
  switch (average) {
    case F1Average::Macro:
      m.f1 = std::accumulate(f1.begin(), f1.end(), 0.0) / k;
      break;
    case F1Average::Weighted:
      for (int i = 0; i < k; ++i) m.f1 += f1[i] * support[i] / total;
      break;
    case F1Average::Binary:
      if (positive < 0 || positive >= k)
        throw Error(ErrorCode::DimensionMismatch, "positive class outside confusion matrix");
      m.f1 = f1[positive];
      break;
  }

  double chance = 0;
  for (int i = 0; i < k; ++i)
    chance += static_cast<double>(c.row(i).sum()) * static_cast<double>(c.col(i).sum());
  chance /= total * total;
  m.kappa = chance == 1.0 ? 0.0 : (m.accuracy - chance) / (1.0 - chance);
  return m;
}

std::string_view to_string(Approach approach) {
  switch (approach) {
    case Approach::StdpOnly: return "stdp_only";
    case Approach::Ensemble: return "ensemble";
    case Approach::EnsemblePruned: return "ensemble_pruned";
  }
  return "?";
}

Approach approach_from_string(std::string_view name) {
  if (name == "stdp_only") return Approach::StdpOnly;
  if (name == "ensemble") return Approach::Ensemble;
  if (name == "ensemble_pruned") return Approach::EnsemblePruned;
  throw Error(ErrorCode::InvalidConfig, "unknown approach '" + std::string(name) + "'");
}

PipelineResult run_pipeline(std::span<const SpikeTrain> train, std::span<const Label> train_labels,
                            std::span<const SpikeTrain> test, std::span<const Label> test_labels,
                            int classes, const PipelineOptions& options, std::uint64_t seed,
                            Network* trained_out) {
  if (test.size() != test_labels.size())
    throw Error(ErrorCode::LabelCountMismatch, "test samples and labels differ in count");
  NetworkConfig config = options.network;
  config.seed = seed;
  Network net(config);

  const TrainingMode mode =
      options.approach == Approach::StdpOnly ? TrainingMode::StdpOnly : TrainingMode::Ensemble;
  PipelineResult result;
  result.train_stats = net.train_unsupervised(train, mode);
  net.train_classifier(train, train_labels);

  if (options.approach == Approach::EnsemblePruned) {
    double threshold = 0;
    if (options.prune_threshold) {
      threshold = *options.prune_threshold;
    } else {
      const auto suggestion = suggest_thresholds(result.train_stats, 1, options.gap_factor);
      threshold = suggestion.thresholds.empty() ? 0.0 : suggestion.thresholds.front();
    }
    try {
      result.prune = prune_by_rate(net, threshold);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::AllNeuronsPruned) throw;
      result.prune_refused = true;
    }
  }

  result.confusion = ConfusionMatrix(classes);
  for (std::size_t k = 0; k < test.size(); ++k) {
    const InferResult r = net.infer(test[k]);
    result.confusion.add(test_labels[k], r.label);
    result.low_confidence += r.low_confidence ? 1 : 0;
  }
  if (!test.empty()) result.metrics = compute_metrics(result.confusion, options.f1_average);
  if (trained_out) *trained_out = std::move(net);
  return result;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1));
  }
  return s;
}

void EvalReport::aggregate() {
  std::vector<double> acc, f1s, kap, rate;
  for (const auto& r : runs) {
    acc.push_back(r.metrics.accuracy);
    f1s.push_back(r.metrics.f1);
    kap.push_back(r.metrics.kappa);
    rate.push_back(r.mean_rate);
  }
  accuracy = summarize(acc);
  f1 = summarize(f1s);
  kappa = summarize(kap);
  mean_rate = summarize(rate);
}

namespace {

std::vector<std::vector<std::size_t>> shuffled_by_class(std::span<const Label> labels,
                                                        std::uint64_t seed) {
  Label top = -1;
  for (Label l : labels) top = std::max(top, l);
  std::vector<std::vector<std::size_t>> by_class(top + 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw Error(ErrorCode::MissingLabel, "negative label");
    by_class[labels[i]].push_back(i);
  }
  Rng rng(seed);
  for (auto& members : by_class) std::shuffle(members.begin(), members.end(), rng);
  return by_class;
}

template <typename T>
std::vector<T> gather(std::span<const T> items, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(items[i]);
  return out;
}

}  // namespace

RunRecord make_run_record(int run, std::uint64_t seed, const PipelineResult& r, std::size_t train_n,
                      std::size_t test_n) {
  RunRecord rec;
  rec.run = run;
  rec.seed = seed;
  rec.metrics = r.metrics;
  rec.mean_rate = r.train_stats.mean_rate;
  rec.entropy_bits = r.train_stats.entropy_bits;
  rec.active_fraction = r.train_stats.active_fraction;
  if (r.prune) {
    rec.prune_threshold = r.prune->threshold;
    rec.pruned_fraction = r.prune->pruned_fraction;
  }
  rec.prune_refused = r.prune_refused;
  rec.train_count = static_cast<int>(train_n);
  rec.test_count = static_cast<int>(test_n);
  return rec;
}

std::vector<int> stratified_folds(std::span<const Label> labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidConfig, "k-fold needs k >= 2");
  if (static_cast<std::size_t>(k) > labels.size())
    throw Error(ErrorCode::ClassWithFewerThanKSamples,
                "k = " + std::to_string(k) + " exceeds the " + std::to_string(labels.size()) +
                    " available samples");
  std::vector<int> fold(labels.size(), 0);
  std::size_t pos = 0;
  for (const auto& members : shuffled_by_class(labels, seed))
    for (std::size_t i : members) fold[i] = static_cast<int>(pos++ % k);
  return fold;
}

SplitIndices stratified_split(std::span<const Label> labels, double train_fraction,
                              std::uint64_t seed) {
  if (!(train_fraction > 0 && train_fraction < 1))
    throw Error(ErrorCode::InvalidConfig, "train_fraction must lie in (0, 1)");
  SplitIndices out;
  const auto by_class = shuffled_by_class(labels, seed);
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const auto& members = by_class[c];
    if (members.empty()) continue;
    const auto n_train =
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
    if (n_train == 0 || n_train >= members.size())
      throw Error(ErrorCode::DegenerateSplit,
                  "class " + std::to_string(c) + " would be absent from one side of the split");
    out.train.insert(out.train.end(), members.begin(), members.begin() + n_train);
    out.test.insert(out.test.end(), members.begin() + n_train, members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::uint64_t repeat_seed(std::uint64_t seed, int r) {
  return derive_seed(derive_seed(seed, stream::kRepeat), static_cast<std::uint64_t>(r));
}

EvalReport run_kfold(std::span<const SpikeTrain> samples, std::span<const Label> labels, int classes,
                     const PipelineOptions& options, int k, std::uint64_t seed, int threads) {
  if (samples.size() != labels.size())
    throw Error(ErrorCode::LabelCountMismatch, "samples and labels differ in count");
  const std::vector<int> fold = stratified_folds(labels, k, derive_seed(seed, stream::kFolds));

  EvalReport report;
  report.approach = options.approach;
  report.protocol = "kfold";
  report.runs.resize(k);
  parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t f) {
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < fold.size(); ++i)
      (fold[i] == static_cast<int>(f) ? test_idx : train_idx).push_back(i);
    const auto train = gather(samples, train_idx);
    const auto train_l = gather(labels, train_idx);
    const auto test = gather(samples, test_idx);
    const auto test_l = gather(labels, test_idx);
    const std::uint64_t s = derive_seed(derive_seed(seed, stream::kFolds), f + 1);
    const PipelineResult r = run_pipeline(train, train_l, test, test_l, classes, options, s);
    report.runs[f] = make_run_record(static_cast<int>(f), s, r, train.size(), test.size());
  });
  report.aggregate();
  return report;
}

EvalReport run_split_repeats(std::span<const SpikeTrain> samples, std::span<const Label> labels,
                             int classes, const PipelineOptions& options, double train_fraction,
                             int repeats, std::uint64_t seed, int threads) {
  if (samples.size() != labels.size())
    throw Error(ErrorCode::LabelCountMismatch, "samples and labels differ in count");
  if (repeats < 1) throw Error(ErrorCode::InvalidConfig, "repeats must be >= 1");
  EvalReport report;
  report.approach = options.approach;
  report.protocol = "split";
  report.runs.resize(repeats);
  // Validate the split shape once up front so the error is not per-thread.
  stratified_split(labels, train_fraction, repeat_seed(seed, 0));
  parallel_for(static_cast<std::size_t>(repeats), threads, [&](std::size_t r) {
    const std::uint64_t s = repeat_seed(seed, static_cast<int>(r));
    const SplitIndices split = stratified_split(labels, train_fraction, s);
    const auto train = gather(samples, split.train);
    const auto train_l = gather(labels, split.train);
    const auto test = gather(samples, split.test);
    const auto test_l = gather(labels, split.test);
    const PipelineResult res = run_pipeline(train, train_l, test, test_l, classes, options, s);
    report.runs[r] = make_run_record(static_cast<int>(r), s, res, train.size(), test.size());
  });
  report.aggregate();
  return report;
}

TTestResult two_sample_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw Error(ErrorCode::InsufficientData, "each sample needs at least 2 values");
  const Summary sa = summarize(a);
  const Summary sb = summarize(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = sa.std * sa.std / na;
  const double vb = sb.std * sb.std / nb;
  const double diff = sa.mean - sb.mean;

  TTestResult r;
  if (va + vb == 0) {
    r.df = na + nb - 2;
    if (diff == 0) return {0.0, 1.0, r.df};
    r.t = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0;
    return r;
  }
  r.t = diff / std::sqrt(va + vb);
  r.df = (va + vb) * (va + vb) / (va * va / (na - 1) + vb * vb / (nb - 1));
  const boost::math::students_t dist(r.df);
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  r.p = std::min(1.0, r.p);
  return r;
}

}  // namespace spikereg
