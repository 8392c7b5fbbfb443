#pragma once

#include <cstdint>
#include <random>

namespace bls {

// SplitMix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
  return mix_seed(mix_seed(seed ^ mix_seed(stream)) + index);
}

// Uniform double in [0, 1) from the top 53 bits; platform independent,
// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

namespace streams {
inline constexpr std::uint64_t kPrune = 1;
inline constexpr std::uint64_t kSampler = 2;
inline constexpr std::uint64_t kData = 3;
inline constexpr std::uint64_t kInit = 4;
}  // namespace streams

}  // namespace bls
