#include "ssm/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "ssm/errors.hpp"
#include "ssm/field.hpp"

namespace ssm::analysis {

namespace {

// Above this many factors the product form is replaced by lgamma.
constexpr std::uint64_t kDirectProductLimit = 1'000'000;

void check_p1(const SecurityParams& p) {
  if (p.k == 0) throw DomainError("p1: K must be positive");
  if (p.total < p.k) throw DomainError("p1: Total must be at least K");
  if (p.t > p.total / p.k) throw DomainError("p1: t exceeds shares per block slice Total/K");
}

double log_binomial_ratio(std::uint64_t m, std::uint64_t total, std::uint64_t t) {
  // ln(C(m, t) / C(total, t)) = sum ln((m - i) / (total - i))
  if (t <= kDirectProductLimit) {
    double acc = 0.0;
    for (std::uint64_t i = 0; i < t; ++i) {
      acc += std::log1p(-static_cast<double>(total - m) / static_cast<double>(total - i));
    }
    return acc;
  }
  const auto lg = [](double x) { return std::lgamma(x); };
  const double dm = static_cast<double>(m);
  const double dn = static_cast<double>(total);
  const double dt = static_cast<double>(t);
  return (lg(dm + 1) - lg(dm - dt + 1)) - (lg(dn + 1) - lg(dn - dt + 1));
}

}  // namespace

BigInt comb(std::uint64_t k, std::uint64_t t) {
  if (t > k) throw DomainError("comb: t exceeds K");
  t = std::min(t, k - t);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= t; ++i) {
    r *= k - t + i;
    r /= i;
  }
  return r;
}

Probability p1(const SecurityParams& p) {
  check_p1(p);
  Probability out;
  if (p.total % p.k != 0) {
    out.warnings.push_back("Total is not a multiple of K; using floor(Total/K)");
  }
  if (p.t == 0) out.warnings.push_back("t = 0 is degenerate: p1 = K");
  const std::uint64_t m = p.total / p.k;
  const double ln = std::log(static_cast<double>(p.k)) + log_binomial_ratio(m, p.total, p.t);
  out.log10 = ln / std::log(10.0);
  out.value = std::exp(ln);
  return out;
}

Rational p1_exact(const SecurityParams& p) {
  check_p1(p);
  const std::uint64_t m = p.total / p.k;
  return Rational(BigInt(p.k) * comb(m, p.t), comb(p.total, p.t));
}

Probability p2(const SecurityParams& p) {
  if (p.t + p.d == 0 || p.s == 0 || p.n == 0) throw DomainError("p2: t+d, S and n must be positive");
  const double base = static_cast<double>(p.t + p.d) * static_cast<double>(p.s) *
                      static_cast<double>(p.n);
  Probability out;
  out.log10 = -static_cast<double>(p.n) * std::log10(base);
  out.value = std::pow(base, -static_cast<double>(p.n));
  return out;
}

SecrecyVerdict secrecy_exhaustive(const SecrecyParams& p) {
  if (p.shares < 2 || p.shares > 8) throw ConfigError("secrecy: K must be in [2, 8]");
  if (p.threshold < 2 || p.threshold > 3 || p.threshold > p.shares) {
    throw ConfigError("secrecy: t must be in [2, 3] and at most K");
  }
  std::array<std::array<std::uint8_t, 256>, 256> mul{};
  for (unsigned a = 0; a < 256; ++a) {
    for (unsigned b = 0; b < 256; ++b) {
      mul[a][b] = gf8::mul(static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b));
    }
  }
  std::vector<std::uint8_t> xs(p.shares);
  std::iota(xs.begin(), xs.end(), std::uint8_t{1});
  if (p.sabotage_zero_x) xs[0] = 0;

  const std::uint32_t view_len = p.threshold - 1;
  const std::uint32_t randoms = p.threshold - 1;
  const std::uint64_t completions = std::uint64_t{1} << (8 * randoms);
  const std::size_t view_space = std::size_t{1} << (8 * view_len);

  SecrecyVerdict verdict;
  verdict.pass = true;
  verdict.completions = completions;

  // Enumerate (t-1)-subsets as ascending index tuples.
  std::vector<std::uint32_t> subset(view_len);
  std::iota(subset.begin(), subset.end(), 0U);
  std::vector<std::uint32_t> reference(view_space);
  std::vector<std::uint32_t> histogram(view_space);
  while (true) {
    ++verdict.subsets;
    for (unsigned secret = 0; secret < 256; ++secret) {
      std::ranges::fill(histogram, 0U);
      for (std::uint64_t r = 0; r < completions; ++r) {
        // f(x) = secret + r0 x + r1 x^2
        const auto r0 = static_cast<std::uint8_t>(r);
        const auto r1 = static_cast<std::uint8_t>(r >> 8);
        std::size_t view = 0;
        for (std::uint32_t j = 0; j < view_len; ++j) {
          const std::uint8_t x = xs[subset[j]];
          std::uint8_t y = static_cast<std::uint8_t>(secret) ^ mul[r0][x];
          if (randoms == 2) y ^= mul[r1][mul[x][x]];
          view = (view << 8) | y;
        }
        ++histogram[view];
      }
      if (secret == 0) {
        reference = histogram;
      } else if (histogram != reference) {
        verdict.pass = false;
        verdict.detail = "view of shares {";
        for (std::uint32_t j = 0; j < view_len; ++j) {
          verdict.detail += (j ? "," : "") + std::to_string(subset[j]);
        }
        verdict.detail += "} depends on the secret";
        return verdict;
      }
    }
    // Next combination.
    std::int64_t i = static_cast<std::int64_t>(view_len) - 1;
    while (i >= 0 && subset[i] == p.shares - view_len + static_cast<std::uint32_t>(i)) --i;
    if (i < 0) break;
    ++subset[i];
    for (auto j = static_cast<std::size_t>(i) + 1; j < view_len; ++j) subset[j] = subset[j - 1] + 1;
  }
  return verdict;
}

}  // namespace ssm::analysis
