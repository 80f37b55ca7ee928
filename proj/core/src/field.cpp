#include "ssm/field.hpp"

#include <array>

#include "ssm/errors.hpp"

namespace ssm {
namespace {

__extension__ using u128 = unsigned __int128;

// Carry-less 64x64 -> 128 product, four bits of b at a time.
u128 clmul(std::uint64_t a, std::uint64_t b) noexcept {
  std::array<u128, 16> table{};
  const u128 wide = a;
  table[1] = wide;
  for (unsigned n = 2; n < 16; n += 2) {
    table[n] = table[n >> 1] << 1;
    table[n + 1] = table[n] ^ wide;
  }
  u128 acc = 0;
  for (int shift = 60; shift >= 0; shift -= 4) {
    acc = (acc << 4) ^ table[(b >> shift) & 0xF];
  }
  return acc;
}

// x^64 == x^4 + x^3 + x + 1, so the high word folds back as hi * 0x1B.
std::uint64_t reduce(u128 product) noexcept {
  auto lo = static_cast<std::uint64_t>(product);
  const auto hi = static_cast<std::uint64_t>(product >> 64);
  lo ^= hi ^ (hi << 1) ^ (hi << 3) ^ (hi << 4);
  const std::uint64_t spill = (hi >> 63) ^ (hi >> 61) ^ (hi >> 60);
  lo ^= spill ^ (spill << 1) ^ (spill << 3) ^ (spill << 4);
  return lo;
}

}  // namespace

FieldElem gf_mul(FieldElem a, FieldElem b) noexcept {
  return FieldElem{reduce(clmul(a.value(), b.value()))};
}

FieldElem gf_pow(FieldElem a, std::uint64_t e) noexcept {
  FieldElem result = FieldElem::one();
  FieldElem base = a;
  while (e != 0) {
    if (e & 1) result = gf_mul(result, base);
    base = gf_mul(base, base);
    e >>= 1;
  }
  return result;
}

FieldElem gf_inv(FieldElem a) {
  if (a.is_zero()) throw DomainError("gf_inv: zero has no multiplicative inverse");
  // The multiplicative group has order 2^64 - 1.
  return gf_pow(a, ~std::uint64_t{0} - 1);
}

void gf_batch_inv(std::span<FieldElem> values) {
  if (values.empty()) return;
  std::vector<FieldElem> prefix(values.size());
  FieldElem running = FieldElem::one();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].is_zero()) throw DomainError("gf_batch_inv: zero element");
    prefix[i] = running;
    running = gf_mul(running, values[i]);
  }
  FieldElem inv = gf_inv(running);
  for (std::size_t i = values.size(); i-- > 0;) {
    const FieldElem original = values[i];
    values[i] = gf_mul(inv, prefix[i]);
    inv = gf_mul(inv, original);
  }
}

namespace gf8 {

std::uint8_t mul(std::uint8_t a, std::uint8_t b) noexcept {
  std::uint8_t p = 0;
  while (b != 0) {
    if (b & 1) p ^= a;
    const bool carry = (a & 0x80) != 0;
    a = static_cast<std::uint8_t>(a << 1);
    if (carry) a ^= 0x1B;
    b >>= 1;
  }
  return p;
}

std::uint8_t inv(std::uint8_t a) {
  if (a == 0) throw DomainError("gf8::inv: zero has no multiplicative inverse");
  // a^254
  std::uint8_t result = 1;
  std::uint8_t base = a;
  for (unsigned e = 254; e != 0; e >>= 1) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
  }
  return result;
}

}  // namespace gf8
}  // namespace ssm
