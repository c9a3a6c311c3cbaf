#pragma once

#include <cstdint>
#include <random>

namespace bpve {

using Rng = std::mt19937_64;

/// One step of SplitMix64; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Independent generator for replicate `index` of a campaign seeded with
/// `master_seed`. Depends only on the pair, never on scheduling order.
Rng substream(std::uint64_t master_seed, std::uint64_t index);

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace bpve
