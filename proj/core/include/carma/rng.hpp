#pragma once

#include <cstdint>
#include <random>

namespace carma {

/// SplitMix64 step; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives the seed for replicate `index` from a master seed; used to give
/// Monte Carlo paths disjoint streams.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t s = master_seed ^ (0xa0761d6478bd642fULL * (index + 1));
  return splitmix64(s);
}

/// One generator per (master seed, stream index); parallel replicates never
/// share a stream.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t stream) {
  std::uint64_t s = master_seed;
  std::uint64_t a = splitmix64(s);
  s ^= 0x517cc1b727220a95ULL * (stream + 1);
  std::uint64_t b = splitmix64(s);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

} // namespace carma
