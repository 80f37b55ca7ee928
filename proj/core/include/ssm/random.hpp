#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace ssm {

/// Uniform integer in [0, bound) via Lemire's multiply-shift with rejection.
/// Stable across standard libraries, unlike std::uniform_int_distribution.
template <class Urbg>
std::uint64_t uniform_below(Urbg& rng, std::uint64_t bound) {
  __extension__ using u128 = unsigned __int128;
  std::uint64_t x = rng();
  u128 m = static_cast<u128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = rng();
      m = static_cast<u128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) from the top 53 bits.
template <class Urbg>
double uniform_unit(Urbg& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Moves a uniformly random `count`-subset to the front (partial Fisher-Yates).
template <class T, class Urbg>
void partial_shuffle(std::span<T> items, std::size_t count, Urbg& rng) {
  for (std::size_t i = 0; i < count && i < items.size(); ++i) {
    const auto j = i + uniform_below(rng, items.size() - i);
    std::swap(items[i], items[j]);
  }
}

template <class T, class Urbg>
void shuffle(std::span<T> items, Urbg& rng) {
  partial_shuffle(items, items.size(), rng);
}

}  // namespace ssm
