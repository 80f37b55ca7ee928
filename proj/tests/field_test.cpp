#include <gtest/gtest.h>

#include <vector>

#include "ssm/errors.hpp"
#include "ssm/field.hpp"
#include "ssm/layout.hpp"

namespace ssm {
namespace {

// Shift-and-add multiplication with bit-at-a-time reduction; shares nothing
// with the windowed implementation.
std::uint64_t slow_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t p = 0;
  for (int i = 0; i < 64; ++i) {
    if ((b >> i) & 1) p ^= a;
    const bool carry = (a >> 63) & 1;
    a <<= 1;
    if (carry) a ^= 0x1B;
  }
  return p;
}

TEST(Field, MatchesShiftAndAddOracleOnAllByteProducts) {
  for (std::uint64_t a = 0; a < 256; ++a) {
    for (std::uint64_t b = 0; b < 256; ++b) {
      ASSERT_EQ(gf_mul(FieldElem{a}, FieldElem{b}).value(), slow_mul(a, b)) << a << "*" << b;
    }
  }
}

TEST(Field, MatchesOracleOnRandomWideOperands) {
  Rng rng(1);
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t a = rng();
    const std::uint64_t b = rng();
    ASSERT_EQ(gf_mul(FieldElem{a}, FieldElem{b}).value(), slow_mul(a, b));
  }
}

TEST(Field, ReductionOfXTo64) {
  // x^63 * x = x^64 = x^4 + x^3 + x + 1
  EXPECT_EQ(gf_mul(FieldElem{1ULL << 63}, FieldElem{2}).value(), 0x1BULL);
}

TEST(Field, RingAxioms) {
  Rng rng(2);
  for (int i = 0; i < 2000; ++i) {
    const FieldElem a{rng()}, b{rng()}, c{rng()};
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + a, FieldElem::zero());
    EXPECT_EQ(a * FieldElem::one(), a);
  }
}

TEST(Field, InverseAgreesWithExponentiation) {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    FieldElem a{rng()};
    if (a.is_zero()) continue;
    const FieldElem inv = gf_inv(a);
    EXPECT_EQ(a * inv, FieldElem::one());
    // Independent route: a^(2^64-2) via square-and-multiply over slow_mul.
    std::uint64_t r = 1, base = a.value();
    for (std::uint64_t e = ~std::uint64_t{0} - 1; e != 0; e >>= 1) {
      if (e & 1) r = slow_mul(r, base);
      base = slow_mul(base, base);
    }
    EXPECT_EQ(inv.value(), r);
  }
}

TEST(Field, InverseOfZeroIsADomainError) {
  EXPECT_THROW(gf_inv(FieldElem::zero()), DomainError);
}

TEST(Field, PowSmallExponents) {
  const FieldElem a{0x1234567890abcdefULL};
  EXPECT_EQ(gf_pow(a, 0), FieldElem::one());
  EXPECT_EQ(gf_pow(a, 1), a);
  EXPECT_EQ(gf_pow(a, 3), a * a * a);
  // The multiplicative group has order 2^64 - 1.
  EXPECT_EQ(gf_pow(a, ~std::uint64_t{0}), FieldElem::one());
}

TEST(Field, BatchInverseMatchesElementwise) {
  Rng rng(4);
  std::vector<FieldElem> v(37);
  for (auto& e : v) e = FieldElem{rng() | 1};
  auto w = v;
  gf_batch_inv(w);
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(w[i], gf_inv(v[i]));
}

TEST(Field, BatchInverseRejectsZero) {
  std::vector<FieldElem> v{FieldElem{3}, FieldElem{0}, FieldElem{5}};
  EXPECT_THROW(gf_batch_inv(v), DomainError);
}

TEST(Gf8, KnownAesProducts) {
  EXPECT_EQ(gf8::mul(0x57, 0x83), 0xC1);
  EXPECT_EQ(gf8::mul(0x57, 0x13), 0xFE);
  EXPECT_EQ(gf8::inv(0x53), 0xCA);
}

TEST(Gf8, EveryNonzeroElementHasAnInverse) {
  for (unsigned a = 1; a < 256; ++a) {
    EXPECT_EQ(gf8::mul(static_cast<std::uint8_t>(a), gf8::inv(static_cast<std::uint8_t>(a))), 1);
  }
  EXPECT_THROW(gf8::inv(0), DomainError);
}

}  // namespace
}  // namespace ssm
