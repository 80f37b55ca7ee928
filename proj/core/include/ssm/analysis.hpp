#pragma once

// Closed-form security figures and an exhaustive secrecy check over GF(2^8).
//
//   p1 = K * C(Total/K, t) / C(Total, t)   chance a blind guess of t shares
//                                          hits t shares of one block
//   p2 = (1 / ((t+d) * S * n))^n           chance of guessing the shuffle

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <vector>

namespace ssm::analysis {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct SecurityParams {
  std::uint64_t total = 2'000'000'000;  // shares in memory
  std::uint64_t k = 32;
  std::uint64_t t = 16;
  std::uint64_t d = 16;
  std::uint64_t s = 4;
  std::uint64_t n = 1;  // accesses before write-back
};

struct Probability {
  double value = 0.0;  // may underflow to 0; log10 stays exact
  double log10 = 0.0;
  std::vector<std::string> warnings;
};

/// Exact binomial coefficient. Throws DomainError if t > k.
BigInt comb(std::uint64_t k, std::uint64_t t);

/// Log-space evaluation. Throws DomainError unless Total >= K >= 1 and
/// t <= floor(Total/K). Warns on t = 0 and on Total not divisible by K.
Probability p1(const SecurityParams& p);

/// Exact rational value of p1 (same preconditions). Intended for small Total.
Rational p1_exact(const SecurityParams& p);

/// Throws DomainError if t + d, S or n is zero.
Probability p2(const SecurityParams& p);

struct SecrecyParams {
  std::uint32_t shares = 4;     // K <= 8, x = 1..K
  std::uint32_t threshold = 2;  // 2 <= t <= 3
  bool sabotage_zero_x = false;  // share 0 at x = 0, which exposes the secret
};

struct SecrecyVerdict {
  bool pass = false;
  std::uint64_t subsets = 0;     // (t-1)-subsets examined
  std::uint64_t completions = 0;  // polynomials enumerated per secret and subset
  std::string detail;            // first failing subset, if any
};

/// For every (t-1)-subset of shares and every secret byte, enumerates all
/// random coefficient choices and histograms the observed share values.
/// PASS iff every subset's histogram is the same for all 256 secrets.
/// Throws ConfigError for parameters outside the enumerable range.
SecrecyVerdict secrecy_exhaustive(const SecrecyParams& p);

}  // namespace ssm::analysis
