#pragma once

#include "spikereg/data.hpp"
#include "spikereg/network.hpp"

namespace fixtures {

struct Encoded {
  spikereg::Dataset analog;
  std::vector<spikereg::SpikeTrain> spikes;
};

inline Encoded encoded(const spikereg::SyntheticSpec& spec) {
  Encoded e{spikereg::generate_synthetic(spec), {}};
  e.spikes = spikereg::encode_dataset(e.analog, spikereg::kDefaultAerFactor);
  return e;
}

inline spikereg::SyntheticSpec small_spec(int per_class = 6, double noise = 0.5) {
  spikereg::SyntheticSpec s;
  s.channels = 6;
  s.timepoints = 64;
  s.per_class_count = per_class;
  s.noise_level = noise;
  return s;
}

inline spikereg::NetworkConfig small_config(int channels = 6, int hidden = 40) {
  spikereg::NetworkConfig c;
  c.channel_count = channels;
  c.hidden_count = hidden;
  return c;
}

}  // namespace fixtures
