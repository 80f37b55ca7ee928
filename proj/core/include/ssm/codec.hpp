#pragma once

// Block <-> share conversion: polynomial construction over GF(2^64), share
// evaluation, interpolation and the seed-coefficient integrity check.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ssm/errors.hpp"
#include "ssm/field.hpp"

namespace ssm {

inline constexpr std::size_t kBlockBytes = 64;
inline constexpr std::size_t kSegmentBytes = 8;
inline constexpr std::size_t kShareBytes = 16;

using DataBlock = std::array<std::uint8_t, kBlockBytes>;

struct CodecParams {
  std::uint32_t shares = 32;      // K
  std::uint32_t threshold = 16;   // t
  std::uint32_t segments = 8;     // W
  std::uint32_t seed_coeffs = 1;  // n_seed

  /// Polynomial degree; t evaluations pin down a degree t-1 polynomial.
  std::uint32_t degree() const noexcept { return threshold - 1; }
  /// Number of PRNG-drawn coefficients between the data and the seeds.
  std::uint32_t random_coeffs() const noexcept { return threshold - segments - seed_coeffs; }
  /// Bytes of a DataBlock carried by the polynomial (8 per segment).
  std::size_t payload_bytes() const noexcept { return std::size_t{segments} * kSegmentBytes; }

  /// Throws ConfigError unless 1 <= W <= 8, W + n_seed <= t <= K.
  void validate() const;
};

struct Share {
  FieldElem x;
  FieldElem y;

  /// 16 bytes: x then y, each little-endian.
  void serialize(std::span<std::uint8_t, kShareBytes> out) const noexcept;
  static Share deserialize(std::span<const std::uint8_t, kShareBytes> in) noexcept;

  friend bool operator==(const Share&, const Share&) = default;
};

struct SeedKey {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
};

struct SeedContext {
  SeedKey key;
  std::uint64_t logical_addr = 0;
  std::uint64_t write_counter = 0;
};

/// Coefficient form; coeffs[i] multiplies x^i.
struct Polynomial {
  std::vector<FieldElem> coeffs;

  FieldElem evaluate(FieldElem x) const noexcept;  // Horner
};

/// Keyed pseudorandom seed coefficient for (key, addr, counter, index).
/// Each argument enters through an injective step, so changing only one
/// of addr/counter/index always changes the output.
FieldElem derive_seed(const SeedContext& ctx, std::uint32_t seed_index,
                      const CodecParams& params);

/// Lays out data segments at degrees [0, W), `random` at [W, t - n_seed) and
/// derived seeds at the top n_seed degrees. Bytes past W*8 are not encoded.
Polynomial build_polynomial(const DataBlock& block, const CodecParams& params,
                            const SeedContext& ctx, std::span<const FieldElem> random);

std::vector<Share> evaluate_shares(const Polynomial& poly, std::span<const FieldElem> xs);

/// Splits `block` into K shares. Random coefficients are drawn first, then
/// K distinct nonzero x values; zero and repeated x draws are redrawn.
template <class Urbg>
std::vector<Share> segment_block(const DataBlock& block, const CodecParams& params,
                                 const SeedContext& ctx, Urbg& rng) {
  params.validate();
  std::vector<FieldElem> random(params.random_coeffs());
  for (auto& r : random) r = FieldElem{static_cast<std::uint64_t>(rng())};
  const Polynomial poly = build_polynomial(block, params, ctx, random);

  std::vector<FieldElem> xs;
  xs.reserve(params.shares);
  while (xs.size() < params.shares) {
    const FieldElem x{static_cast<std::uint64_t>(rng())};
    if (x.is_zero()) continue;
    bool duplicate = false;
    for (const FieldElem seen : xs) duplicate |= (seen == x);
    if (!duplicate) xs.push_back(x);
  }
  return evaluate_shares(poly, xs);
}

/// f(x) of the interpolant through `shares` using barycentric weights
/// w_i = 1 / prod_{j != i} (x_i - x_j). Throws DomainError on duplicate nodes
/// or when x coincides with a node.
FieldElem barycentric_eval(std::span<const Share> shares, FieldElem x);

/// Full coefficient vector of the unique degree-(n-1) polynomial through n
/// shares (Lagrange basis expansion, O(n^2)).
Polynomial interpolate_coefficients(std::span<const Share> shares);

struct Reconstruction {
  DataBlock data{};
  bool intact = false;  // every seed coefficient matched
};

/// Needs exactly t shares. Integrity failure is reported, not thrown.
Reconstruction reconstruct(std::span<const Share> shares, const CodecParams& params,
                           const SeedContext& ctx);

}  // namespace ssm
