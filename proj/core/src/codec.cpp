#include "ssm/codec.hpp"

#include <string>

#include "ssm/mix.hpp"

namespace ssm {
namespace {

std::uint64_t load_le64(const std::uint8_t* p) noexcept {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void store_le64(std::uint64_t v, std::uint8_t* p) noexcept {
  for (int i = 0; i < 8; ++i) {
    p[i] = static_cast<std::uint8_t>(v);
    v >>= 8;
  }
}

void require_distinct_nodes(std::span<const Share> shares, const char* who) {
  for (std::size_t i = 0; i < shares.size(); ++i) {
    for (std::size_t j = i + 1; j < shares.size(); ++j) {
      if (shares[i].x == shares[j].x) {
        throw DomainError(std::string(who) + ": duplicate x-value among shares");
      }
    }
  }
}

}  // namespace

void CodecParams::validate() const {
  if (segments < 1 || segments > kBlockBytes / kSegmentBytes) {
    throw ConfigError("codec: W must be in [1, 8]");
  }
  if (threshold < 1 || threshold > shares) throw ConfigError("codec: need 1 <= t <= K");
  if (shares > 0xFFFF) throw ConfigError("codec: K must fit in 16 bits");
  if (segments + seed_coeffs > threshold) throw ConfigError("codec: need W + n_seed <= t");
}

void Share::serialize(std::span<std::uint8_t, kShareBytes> out) const noexcept {
  store_le64(x.value(), out.data());
  store_le64(y.value(), out.data() + 8);
}

Share Share::deserialize(std::span<const std::uint8_t, kShareBytes> in) noexcept {
  return Share{FieldElem{load_le64(in.data())}, FieldElem{load_le64(in.data() + 8)}};
}

FieldElem Polynomial::evaluate(FieldElem x) const noexcept {
  FieldElem acc;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

FieldElem derive_seed(const SeedContext& ctx, std::uint32_t seed_index,
                      const CodecParams& params) {
  if (seed_index >= params.seed_coeffs) {
    throw DomainError("derive_seed: seed index out of range");
  }
  std::uint64_t h = mix_absorb(0x5353'4d2d'7365'6564ULL, ctx.key.lo, ctx.logical_addr);
  h = mix_absorb(h, ctx.key.hi, ctx.write_counter);
  h = mix_absorb(h, ctx.key.lo ^ 0x9e37'79b9'7f4a'7c15ULL, seed_index);
  return FieldElem{h};
}

Polynomial build_polynomial(const DataBlock& block, const CodecParams& params,
                            const SeedContext& ctx, std::span<const FieldElem> random) {
  params.validate();
  if (random.size() != params.random_coeffs()) {
    throw DomainError("build_polynomial: wrong number of random coefficients");
  }
  Polynomial poly;
  poly.coeffs.reserve(params.threshold);
  for (std::uint32_t i = 0; i < params.segments; ++i) {
    poly.coeffs.emplace_back(load_le64(block.data() + i * kSegmentBytes));
  }
  poly.coeffs.insert(poly.coeffs.end(), random.begin(), random.end());
  for (std::uint32_t i = 0; i < params.seed_coeffs; ++i) {
    poly.coeffs.push_back(derive_seed(ctx, i, params));
  }
  return poly;
}

std::vector<Share> evaluate_shares(const Polynomial& poly, std::span<const FieldElem> xs) {
  std::vector<Share> shares;
  shares.reserve(xs.size());
  for (const FieldElem x : xs) shares.push_back(Share{x, poly.evaluate(x)});
  return shares;
}

FieldElem barycentric_eval(std::span<const Share> shares, FieldElem x) {
  if (shares.empty()) throw DomainError("barycentric_eval: no shares");
  require_distinct_nodes(shares, "barycentric_eval");
  const std::size_t n = shares.size();

  // Layout: [0, n) node products, [n, 2n) (x - x_i).
  std::vector<FieldElem> work(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (shares[i].x == x) {
      throw DomainError("barycentric_eval: query point coincides with a node");
    }
    FieldElem prod = FieldElem::one();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) prod *= shares[i].x - shares[j].x;
    }
    work[i] = prod;
    work[n + i] = x - shares[i].x;
  }
  gf_batch_inv(work);

  FieldElem numer;
  FieldElem denom;
  for (std::size_t i = 0; i < n; ++i) {
    const FieldElem term = work[i] * work[n + i];  // w_i / (x - x_i)
    numer += term * shares[i].y;
    denom += term;
  }
  return numer * gf_inv(denom);
}

Polynomial interpolate_coefficients(std::span<const Share> shares) {
  if (shares.empty()) throw DomainError("interpolate_coefficients: no shares");
  require_distinct_nodes(shares, "interpolate_coefficients");
  const std::size_t n = shares.size();

  // master(x) = prod (x - x_i), degree n.
  std::vector<FieldElem> master(n + 1);
  master[0] = FieldElem::one();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k > 0; --k) {
      master[k] = master[k - 1] + master[k] * shares[i].x;
    }
    master[0] *= shares[i].x;
  }

  // basis[i] = master / (x - x_i), by synthetic division.
  std::vector<FieldElem> basis(n * n);
  std::vector<FieldElem> denominators(n);
  for (std::size_t i = 0; i < n; ++i) {
    FieldElem* q = basis.data() + i * n;
    q[n - 1] = master[n];
    for (std::size_t k = n - 1; k > 0; --k) q[k - 1] = master[k] + shares[i].x * q[k];
    FieldElem at_node;
    for (std::size_t k = n; k-- > 0;) at_node = at_node * shares[i].x + q[k];
    denominators[i] = at_node;
  }
  gf_batch_inv(denominators);

  Polynomial poly;
  poly.coeffs.assign(n, FieldElem{});
  for (std::size_t i = 0; i < n; ++i) {
    const FieldElem scale = shares[i].y * denominators[i];
    const FieldElem* q = basis.data() + i * n;
    for (std::size_t k = 0; k < n; ++k) poly.coeffs[k] += scale * q[k];
  }
  return poly;
}

Reconstruction reconstruct(std::span<const Share> shares, const CodecParams& params,
                           const SeedContext& ctx) {
  params.validate();
  if (shares.size() != params.threshold) {
    throw DomainError("reconstruct: expected exactly t shares");
  }
  const Polynomial poly = interpolate_coefficients(shares);

  Reconstruction out;
  for (std::uint32_t i = 0; i < params.segments; ++i) {
    store_le64(poly.coeffs[i].value(), out.data.data() + i * kSegmentBytes);
  }
  out.intact = true;
  const std::uint32_t first_seed = params.threshold - params.seed_coeffs;
  for (std::uint32_t i = 0; i < params.seed_coeffs; ++i) {
    out.intact &= (poly.coeffs[first_seed + i] == derive_seed(ctx, i, params));
  }
  return out;
}

}  // namespace ssm
