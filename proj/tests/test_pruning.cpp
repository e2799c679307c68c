#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "spikereg/classifier.hpp"
#include "spikereg/pruning.hpp"

using namespace spikereg;

namespace {

Network trained_network(std::uint64_t seed = 1) {
  const auto data = fixtures::encoded(fixtures::small_spec());
  auto cfg = fixtures::small_config();
  cfg.seed = seed;
  Network net(cfg);
  net.train_unsupervised(data.spikes, TrainingMode::StdpOnly);
  net.train_classifier(data.spikes, data.analog.labels);
  return net;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("rule on a hand-made rate list") {
  const std::vector<double> rates{0.0, 0.1, 0.2, 0.3, 0.4};
  const auto r = plan_pruning(rates, 0.15);
  CHECK(r.pruned_indices == std::vector<int>{0, 1});
  CHECK(r.pruned_fraction == doctest::Approx(0.4));
  CHECK(r.surviving_count == 3);
  // Equal to the threshold survives.
  CHECK(plan_pruning(rates, 0.2).pruned_indices == std::vector<int>{0, 1});
  CHECK(plan_pruning(rates, 0.0).pruned_indices.empty());
  CHECK(plan_pruning(rates, 0.0).pruned_fraction == 0.0);
}

TEST_CASE("threshold validation") {
  const std::vector<double> rates{0.1, 0.2};
  CHECK(code_of([&] { plan_pruning(rates, -0.1); }) == ErrorCode::InvalidThreshold);
  CHECK(code_of([&] { plan_pruning(rates, 1.5); }) == ErrorCode::InvalidThreshold);
  CHECK(code_of([&] { plan_pruning(rates, 0.5); }) == ErrorCode::AllNeuronsPruned);
  Network fresh(fixtures::small_config());
  CHECK(code_of([&] { prune_by_rate(fresh, 0.1); }) == ErrorCode::NotTrained);
}

TEST_CASE("refusing to prune everything leaves the network untouched") {
  Network net = trained_network();
  CHECK(code_of([&] { prune_by_rate(net, 1.0); }) == ErrorCode::AllNeuronsPruned);
  CHECK(net.active_count() == net.config().hidden_count);
  CHECK_FALSE(net.prune_report().has_value());
}

TEST_CASE("idempotent, nested and silencing") {
  Network net = trained_network();
  const auto stats = *net.training_stats();
  const double hi = stats.per_neuron_rate.maxCoeff();
  const std::vector<double> thresholds{0.25 * hi, 0.5 * hi, 0.75 * hi};

  std::vector<int> previous;
  int previous_surviving = net.config().hidden_count;
  for (double t : thresholds) {
    const auto a = prune_by_rate(net, t);
    const auto b = prune_by_rate(net, t);
    CHECK(a.pruned_indices == b.pruned_indices);
    CHECK(std::includes(a.pruned_indices.begin(), a.pruned_indices.end(), previous.begin(),
                        previous.end()));
    CHECK(a.surviving_count <= previous_surviving);
    CHECK(net.active_count() == a.surviving_count);
    previous = a.pruned_indices;
    previous_surviving = a.surviving_count;

    const auto data = fixtures::encoded(fixtures::small_spec());
    for (const auto& s : data.spikes) {
      const auto p = net.propagate(s);
      for (int i : a.pruned_indices) CHECK(p.hidden_raster[i].empty());
    }
  }
  net.restore_all_neurons();
  CHECK(net.active_count() == net.config().hidden_count);
  CHECK_FALSE(net.prune_report().has_value());
}

TEST_CASE("pruning only reads training counts") {
  Network net = trained_network();
  const auto before = net.to_model();
  prune_by_rate(net, net.training_stats()->mean_rate);
  const auto after = net.to_model();
  CHECK(after.synapses == before.synapses);
  CHECK(after.gallery.size() == before.gallery.size());
  for (std::size_t i = 0; i < before.neuron_states.size(); ++i) {
    CHECK(after.neuron_states[i].spike_count == before.neuron_states[i].spike_count);
    CHECK(after.neuron_states[i].v_thr == before.neuron_states[i].v_thr);
  }
}

TEST_CASE("suggestions: no gaps") {
  const std::vector<double> rates(8, 0.03);
  const auto s = suggest_thresholds(rates, 3);
  CHECK(s.thresholds == std::vector<double>{0.03});
  CHECK(s.fewer_clusters_than_k);
  CHECK(plan_pruning(rates, s.thresholds[0]).pruned_indices.empty());
}

TEST_CASE("suggestions: two well separated groups") {
  std::vector<double> rates(5, 0.01);
  rates.insert(rates.end(), 5, 0.5);
  const auto s = suggest_thresholds(rates, 1);
  REQUIRE(s.thresholds.size() == 1);
  CHECK(s.thresholds[0] > 0.01);
  CHECK(s.thresholds[0] <= 0.5);
  CHECK_FALSE(s.fewer_clusters_than_k);
  CHECK(plan_pruning(rates, s.thresholds[0]).pruned_indices == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("suggestions: first threshold isolates a separated low-rate cluster") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> low(0.001, 0.004), high(0.02, 0.06);
  std::vector<double> rates;
  std::vector<int> low_members;
  for (int i = 0; i < 200; ++i) {
    const bool is_low = i % 5 == 0;
    rates.push_back(is_low ? low(rng) : high(rng));
    if (is_low) low_members.push_back(i);
  }
  const auto s = suggest_thresholds(rates, 3, 10.0);
  REQUIRE_FALSE(s.thresholds.empty());
  CHECK(plan_pruning(rates, s.thresholds[0]).pruned_indices == low_members);
  CHECK(std::is_sorted(s.thresholds.begin(), s.thresholds.end()));
}

TEST_CASE("suggestions are ascending and prune nested sets on a trained model") {
  Network net = trained_network(3);
  const auto s = suggest_thresholds(*net.training_stats(), 3);
  CHECK(std::is_sorted(s.thresholds.begin(), s.thresholds.end()));
  std::size_t previous = 0;
  for (double t : s.thresholds) {
    const auto r = prune_by_rate(net, t);
    CHECK(r.pruned_indices.size() >= previous);
    previous = r.pruned_indices.size();
  }
}

TEST_CASE("masking neurons that only carry training noise does not hurt held-out accuracy") {
  // Dimensions 0..3 encode the class; 4..11 are rarely-firing neurons whose
  // weights in the gallery are noise that held-out samples never share.
  std::mt19937_64 rng(11);
  std::normal_distribution<double> jitter(0, 0.05);
  std::uniform_real_distribution<double> noise(0, 1.5);
  auto make = [&](int label, bool training) {
    Vector<double> v = Vector<double>::Zero(12);
    for (int d = 0; d < 4; ++d) v[d] = (d / 2 == label ? 1.0 : 0.2) + jitter(rng);
    if (training)
      for (int d = 4; d < 12; ++d) v[d] = noise(rng) * (rng() % 3 == 0);
    return v;
  };
  std::vector<OutputNeuron> gallery;
  for (int k = 0; k < 20; ++k) gallery.push_back({make(k % 2, true), k % 2, k});
  std::vector<std::uint8_t> mask(12, 1);
  std::fill(mask.begin() + 4, mask.end(), 0);
  int correct_all = 0, correct_masked = 0;
  for (int k = 0; k < 200; ++k) {
    const int label = k % 2;
    const auto v = make(label, false);
    correct_all += classify(v, gallery).label == label;
    correct_masked += classify(v, gallery, mask).label == label;
  }
  CHECK(correct_masked >= correct_all);
  CHECK(correct_masked == 200);
}
