#pragma once

#include <cstdint>
#include <random>

namespace spikereg {

using Rng = std::mt19937_64;

// Independent child seed for a named stream (splitmix64 finaliser).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace stream {
inline constexpr std::uint64_t kWeights = 1;
inline constexpr std::uint64_t kInputMapping = 2;
inline constexpr std::uint64_t kSampleOrder = 3;
inline constexpr std::uint64_t kSplit = 4;
inline constexpr std::uint64_t kFolds = 5;
inline constexpr std::uint64_t kRepeat = 6;
inline constexpr std::uint64_t kSynthetic = 7;
}  // namespace stream

}  // namespace spikereg
