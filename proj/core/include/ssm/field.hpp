#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ssm {

/// Element of GF(2^64) with reduction polynomial x^64 + x^4 + x^3 + x + 1.
/// Bit i of the value is the coefficient of x^i.
class FieldElem {
 public:
  constexpr FieldElem() = default;
  constexpr explicit FieldElem(std::uint64_t v) : value_(v) {}

  constexpr std::uint64_t value() const noexcept { return value_; }
  constexpr bool is_zero() const noexcept { return value_ == 0; }

  static constexpr FieldElem zero() { return FieldElem{0}; }
  static constexpr FieldElem one() { return FieldElem{1}; }

  friend constexpr bool operator==(FieldElem, FieldElem) = default;
  friend constexpr auto operator<=>(FieldElem, FieldElem) = default;

 private:
  std::uint64_t value_ = 0;
};

/// Low-order terms of the reduction polynomial (x^4 + x^3 + x + 1).
inline constexpr std::uint64_t kGf64ReductionTail = 0x1B;

constexpr FieldElem gf_add(FieldElem a, FieldElem b) noexcept {
  return FieldElem{a.value() ^ b.value()};
}

FieldElem gf_mul(FieldElem a, FieldElem b) noexcept;

/// Multiplicative inverse, computed as a^(2^64 - 2). Throws DomainError on 0.
FieldElem gf_inv(FieldElem a);

FieldElem gf_pow(FieldElem a, std::uint64_t e) noexcept;

/// Inverts every element in place with one field inversion (Montgomery's
/// trick). Throws DomainError if any element is zero.
void gf_batch_inv(std::span<FieldElem> values);

inline FieldElem operator+(FieldElem a, FieldElem b) noexcept { return gf_add(a, b); }
inline FieldElem operator-(FieldElem a, FieldElem b) noexcept { return gf_add(a, b); }
inline FieldElem operator*(FieldElem a, FieldElem b) noexcept { return gf_mul(a, b); }
inline FieldElem& operator+=(FieldElem& a, FieldElem b) noexcept { return a = gf_add(a, b); }
inline FieldElem& operator*=(FieldElem& a, FieldElem b) noexcept { return a = gf_mul(a, b); }

// GF(2^8) with the AES polynomial x^8 + x^4 + x^3 + x + 1; small enough for
// exhaustive enumeration in the secrecy checks.
namespace gf8 {

std::uint8_t mul(std::uint8_t a, std::uint8_t b) noexcept;
std::uint8_t inv(std::uint8_t a);

}  // namespace gf8

}  // namespace ssm
