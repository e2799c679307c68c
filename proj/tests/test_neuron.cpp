#include <doctest.h>

#include <cmath>
#include <random>

#include "spikereg/neuron.hpp"

using namespace spikereg;

namespace {

// Steps from rest until the first spike under constant current.
int first_spike_step(double current, double v_thr, const LifParams<double>& p, int limit = 100000) {
  auto s = NeuronState<double>::at_rest(p);
  s.v_thr = v_thr;
  for (int t = 1; t <= limit; ++t)
    if (lif_step(s, current, p)) return t;
  return -1;
}

int analytic_crossing(double current, double v_thr, const LifParams<double>& p) {
  return static_cast<int>(std::ceil(-p.tau_m() * std::log(1.0 - v_thr / (p.r * current))));
}

}  // namespace

TEST_CASE("equilibrium at rest") {
  const LifParams<double> p;
  auto s = NeuronState<double>::at_rest(p);
  for (int t = 0; t < 100; ++t) CHECK_FALSE(lif_step(s, 0.0, p));
  CHECK(s.v == 0.0);
}

TEST_CASE("subthreshold current converges monotonically and never fires") {
  const LifParams<double> p;
  auto s = NeuronState<double>::at_rest(p);
  const double current = 0.04;  // R*I = 0.04 < v_thr = 0.05
  double prev = s.v;
  for (int t = 1; t <= 200; ++t) {
    REQUIRE_FALSE(lif_step(s, current, p));
    CHECK(s.v > prev);
    CHECK(s.v < current);
    // Euler recursion of the closed form v(t) = R*I*(1 - (1 - dt/tau)^t)
    CHECK(s.v == doctest::Approx(current * (1 - std::pow(1 - p.dt / p.tau_m(), t))).epsilon(1e-12));
    prev = s.v;
  }
}

TEST_CASE("first spike within one step of the analytic crossing time") {
  const LifParams<double> p;
  for (double ratio : {1.25, 1.5, 2.0, 3.0, 5.0, 10.0}) {
    const double v_thr = 0.05;
    const double current = ratio * v_thr;
    const int sim = first_spike_step(current, v_thr, p);
    CHECK(std::abs(sim - analytic_crossing(current, v_thr, p)) <= 1);
  }
}

TEST_CASE("periodic firing with refractory interval") {
  const LifParams<double> p;
  auto s = NeuronState<double>::at_rest(p);
  const double current = 0.1;
  std::vector<int> spikes;
  for (int t = 1; t <= 300; ++t)
    if (lif_step(s, current, p)) spikes.push_back(t);
  REQUIRE(spikes.size() > 3);
  const int expected = p.t_refractory + analytic_crossing(current, s.v_thr, p);
  for (std::size_t k = 1; k < spikes.size(); ++k) {
    CHECK(spikes[k] - spikes[k - 1] == spikes[1] - spikes[0]);
    CHECK(std::abs(spikes[k] - spikes[k - 1] - expected) <= 1);
  }
}

TEST_CASE("refractory steps hold the membrane at rest") {
  const LifParams<double> p;
  auto s = NeuronState<double>::at_rest(p);
  s.v_thr = 1e-9;
  REQUIRE(lif_step(s, 1.0, p));
  for (int k = 0; k < p.t_refractory; ++k) {
    CHECK_FALSE(lif_step(s, 1.0, p));
    CHECK(s.v == p.v_rest);
  }
  CHECK(lif_step(s, 1.0, p));
}

TEST_CASE("non-finite current is rejected") {
  const LifParams<double> p;
  auto s = NeuronState<double>::at_rest(p);
  CHECK_THROWS_AS(lif_step(s, std::numeric_limits<double>::infinity(), p), Error);
}

TEST_CASE("IP increment for the reference rates") {
  const LifParams<double> p;
  const IpRates<double> rates;
  auto s = NeuronState<double>::at_rest(p);
  ip_update(s, true, rates, 200, p);
  CHECK(s.v_thr == doctest::Approx(0.06).epsilon(1e-15));
  ip_update(s, false, rates, 200, p);
  CHECK(s.v_thr == doctest::Approx(0.06 - 1e-4).epsilon(1e-15));
}

TEST_CASE("zero rates leave the threshold unchanged") {
  const LifParams<double> p;
  auto s = NeuronState<double>::at_rest(p);
  for (int k = 0; k < 1000; ++k) ip_update(s, k % 3 == 0, IpRates<double>{0, 0}, 200, p);
  CHECK(s.v_thr == p.v_init);
}

TEST_CASE("alternating history with equal rates cancels") {
  const LifParams<double> p;
  const IpRates<double> rates{1e-4, 1e-4};
  auto s = NeuronState<double>::at_rest(p);
  for (int k = 0; k < 200; ++k) {
    ip_update(s, k % 2 == 0, rates, 200, p);
    if (k % 2 == 1) CHECK(s.v_thr == doctest::Approx(p.v_init).epsilon(1e-12));
  }
}

TEST_CASE("threshold floor") {
  const LifParams<double> p;
  auto s = NeuronState<double>::at_rest(p);
  for (int k = 0; k < 10; ++k) ip_update(s, false, IpRates<double>{0, 1.0}, 200, p);
  CHECK(s.v_thr == p.v_thr_min());
  CHECK(s.v_thr > 0);
}

TEST_CASE("float instantiation") {
  const LifParams<float> p;
  auto s = NeuronState<float>::at_rest(p);
  int t = 0;
  while (!lif_step(s, 0.1f, p)) ++t;
  CHECK(t + 1 == 7);
}
