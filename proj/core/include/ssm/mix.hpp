#pragma once

#include <cstdint>

namespace ssm {

// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

/// Keyed absorb of one word into a running state. For a fixed state and key
/// the map word -> result is injective.
constexpr std::uint64_t mix_absorb(std::uint64_t state, std::uint64_t key,
                                   std::uint64_t word) noexcept {
  return mix64(state ^ key ^ word);
}

}  // namespace ssm
