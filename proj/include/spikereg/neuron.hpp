#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "spikereg/error.hpp"

namespace spikereg {

template <typename Scalar = double>
struct LifParams {
  Scalar v_init = Scalar(0.05);  // initial spiking threshold
  Scalar v_rest = Scalar(0);
  Scalar r = Scalar(1);
  Scalar c = Scalar(10);
  int t_refractory = 5;  // timesteps
  Scalar dt = Scalar(1);
  // Lower bound for the adaptive threshold, as a fraction of v_init.
  Scalar v_thr_floor_ratio = Scalar(1e-6);

  Scalar tau_m() const { return r * c; }
  Scalar v_thr_min() const { return v_thr_floor_ratio * v_init; }

  bool valid() const {
    return tau_m() > 0 && t_refractory >= 0 && dt > 0 && v_init > 0 && v_thr_floor_ratio > 0;
  }
};

template <typename Scalar = double>
struct NeuronState {
  Scalar v = 0;
  Scalar v_thr = 0;
  int refractory_remaining = 0;
  std::int64_t spike_count = 0;
  bool active = true;

  static NeuronState at_rest(const LifParams<Scalar>& p) {
    NeuronState s;
    s.v = p.v_rest;
    s.v_thr = p.v_init;
    return s;
  }
};

template <typename Scalar = double>
struct IpRates {
  Scalar theta_pos = Scalar(1e-3);
  Scalar theta_neg = Scalar(1e-5);

  bool valid() const { return theta_pos >= 0 && theta_pos <= 1 && theta_neg >= 0 && theta_neg <= 1; }
};

/// One explicit-Euler step of the leaky integrate-and-fire membrane. Returns
/// true when the neuron fired; the state is reset and refractory afterwards.
/// Callers skip inactive (pruned) neurons.
template <typename Scalar>
bool lif_step(NeuronState<Scalar>& s, Scalar input_current, const LifParams<Scalar>& p) {
  if (!std::isfinite(input_current))
    throw Error(ErrorCode::NonFiniteCurrent, "input current is not finite");
  if (s.refractory_remaining > 0) {
    --s.refractory_remaining;
    s.v = p.v_rest;
    return false;
  }
  s.v += (p.dt / p.tau_m()) * (p.v_rest - s.v + p.r * input_current);
  if (s.v >= s.v_thr) {
    s.v = p.v_rest;
    s.refractory_remaining = p.t_refractory;
    ++s.spike_count;
    return true;
  }
  return false;
}

/// Two-rate intrinsic plasticity: the threshold rises by N*theta_pos*v_init
/// after a spike and sinks by N*theta_neg*v_init otherwise.
template <typename Scalar>
void ip_update(NeuronState<Scalar>& s, bool spiked_last_step, const IpRates<Scalar>& rates,
               int n_hidden, const LifParams<Scalar>& p) {
  const Scalar n = static_cast<Scalar>(n_hidden);
  if (spiked_last_step)
    s.v_thr += n * rates.theta_pos * p.v_init;
  else
    s.v_thr -= n * rates.theta_neg * p.v_init;
  s.v_thr = std::max(s.v_thr, p.v_thr_min());
}

}  // namespace spikereg
