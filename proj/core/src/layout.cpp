#include "ssm/layout.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "ssm/random.hpp"

namespace ssm {
namespace {

constexpr char kMagic[8] = {'S', 'S', 'M', 'M', 'A', 'P', 0, 1};

template <class T>
void put(std::ostream& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.put(static_cast<char>(static_cast<std::uint64_t>(v) >> (8 * i)));
  }
}

template <class T>
T get(std::istream& in) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw ConfigError("map load: truncated input");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace

std::uint64_t GeometryConfig::resolved_physical_blocks(const CodecParams& params) const {
  if (physical_blocks != 0) return physical_blocks;
  if (shares_per_block == 0) throw ConfigError("geometry: S must be positive");
  const double needed = static_cast<double>(logical_blocks) * params.shares /
                        shares_per_block * slack;
  return static_cast<std::uint64_t>(std::ceil(needed - 1e-9));
}

SsmMap::SsmMap(std::uint64_t logical, std::uint64_t physical, std::uint32_t s,
               const CodecParams& p)
    : logical_blocks_(logical),
      physical_blocks_(physical),
      s_(s),
      k_(p.shares),
      params_(p),
      forward_(logical * p.shares),
      reverse_(physical * s, kFree) {}

SsmMap SsmMap::init_layout(const GeometryConfig& geom, const CodecParams& params, Rng& rng) {
  params.validate();
  if (geom.shares_per_block == 0) throw ConfigError("geometry: S must be positive");
  const std::uint64_t physical = geom.resolved_physical_blocks(params);
  if (geom.logical_blocks * params.shares > physical * geom.shares_per_block) {
    throw ConfigError("geometry: logical_blocks * K exceeds physical slot capacity");
  }
  if (geom.logical_blocks > 0 && physical < params.shares) {
    throw ConfigError("geometry: fewer physical blocks than K");
  }

  SsmMap map(geom.logical_blocks, physical, geom.shares_per_block, params);
  std::vector<std::uint64_t> open(physical);
  for (std::uint64_t b = 0; b < physical; ++b) open[b] = b;
  std::vector<std::uint32_t> free_count(physical, geom.shares_per_block);
  std::vector<std::uint32_t> free_slots;

  for (std::uint64_t logical = 0; logical < geom.logical_blocks; ++logical) {
    if (open.size() < params.shares) {
      throw ConfigError("geometry: not enough partially free blocks for distinct placement");
    }
    // Near the end, blocks with as many free slots as there are blocks left
    // to place must be used now or the remaining placements become infeasible.
    const std::uint64_t remaining = geom.logical_blocks - logical;
    std::size_t forced = 0;
    if (remaining <= map.s_) {
      std::uint64_t reach = 0;
      std::size_t high = 0;
      for (const std::uint64_t b : open) {
        reach += std::min<std::uint64_t>(free_count[b], remaining);
        high += free_count[b] >= remaining;
      }
      const std::uint64_t spare = reach - remaining * params.shares;
      forced = high > spare ? high - static_cast<std::size_t>(spare) : 0;
      if (forced > params.shares) {
        throw ConfigError("geometry: not enough partially free blocks for distinct placement");
      }
      const auto mid = std::partition(open.begin(), open.end(),
                                      [&](std::uint64_t b) { return free_count[b] >= remaining; });
      shuffle(std::span(open.begin(), mid), rng);
    }
    partial_shuffle(std::span(open).subspan(forced), params.shares - forced, rng);
    for (std::uint32_t ordinal = 0; ordinal < params.shares; ++ordinal) {
      const std::uint64_t block = open[ordinal];
      free_slots.clear();
      for (std::uint32_t s = 0; s < map.s_; ++s) {
        if (map.reverse_[block * map.s_ + s] == kFree) free_slots.push_back(s);
      }
      const auto slot = free_slots[uniform_below(rng, free_slots.size())];
      const ShareLocation loc{block, slot};
      const ShareOrigin origin{logical, ordinal};
      map.forward_[map.entry_index(origin)] = loc;
      map.reverse_[map.slot_index(loc)] = map.entry_index(origin);
      --free_count[block];
    }
    map.occupied_ += params.shares;
    // Drop blocks that just filled up.
    for (std::size_t i = params.shares; i-- > 0;) {
      if (free_count[open[i]] == 0) {
        open[i] = open.back();
        open.pop_back();
      }
    }
  }
  return map;
}

std::span<const ShareLocation> SsmMap::lookup(std::uint64_t logical) const {
  if (logical >= logical_blocks_) {
    throw DomainError("lookup: unknown logical block " + std::to_string(logical));
  }
  return std::span(forward_).subspan(logical * k_, k_);
}

void SsmMap::check_slot(ShareLocation loc) const {
  if (loc.block >= physical_blocks_ || loc.slot >= s_) {
    throw DomainError("share location out of range");
  }
}

std::optional<ShareOrigin> SsmMap::owner(ShareLocation loc) const {
  check_slot(loc);
  const std::uint64_t e = reverse_[slot_index(loc)];
  if (e == kFree) return std::nullopt;
  return ShareOrigin{e / k_, static_cast<std::uint32_t>(e % k_)};
}

std::uint32_t SsmMap::occupied_in_block(std::uint64_t block) const {
  check_slot(ShareLocation{block, 0});
  std::uint32_t n = 0;
  for (std::uint32_t s = 0; s < s_; ++s) n += reverse_[block * s_ + s] != kFree;
  return n;
}

void SsmMap::remap(std::span<const ShareMove> moves) {
  if (moves.empty()) return;

  std::vector<std::uint64_t> entries;
  std::vector<std::uint64_t> vacated;
  std::vector<std::uint64_t> targets;
  for (const auto& m : moves) {
    if (m.origin.logical >= logical_blocks_ || m.origin.ordinal >= k_) {
      throw DomainError("remap: unknown share origin");
    }
    if (!m.to.in_stash()) {
      check_slot(m.to);
      targets.push_back(slot_index(m.to));
    }
    const std::uint64_t e = entry_index(m.origin);
    entries.push_back(e);
    if (!forward_[e].in_stash()) vacated.push_back(slot_index(forward_[e]));
  }
  std::ranges::sort(entries);
  if (std::ranges::adjacent_find(entries) != entries.end()) {
    throw DomainError("remap: a share is moved twice in one batch");
  }
  std::ranges::sort(vacated);
  std::ranges::sort(targets);
  if (std::ranges::adjacent_find(targets) != targets.end()) {
    throw DomainError("remap: two shares target the same slot");
  }
  for (const std::uint64_t t : targets) {
    if (reverse_[t] != kFree && !std::ranges::binary_search(vacated, t)) {
      throw DomainError("remap: target slot is occupied");
    }
  }

  // Distinct-block rule for every logical block touched by the batch.
  std::vector<const ShareMove*> by_origin;
  by_origin.reserve(moves.size());
  for (const auto& m : moves) by_origin.push_back(&m);
  std::ranges::sort(by_origin, {}, [](const ShareMove* m) { return m->origin; });
  std::vector<ShareLocation> scratch(k_);
  for (std::size_t i = 0; i < by_origin.size();) {
    const std::uint64_t logical = by_origin[i]->origin.logical;
    const std::size_t group = i;
    bool to_memory = false;
    for (; i < by_origin.size() && by_origin[i]->origin.logical == logical; ++i) {
      to_memory |= !by_origin[i]->to.in_stash();
    }
    if (!to_memory) continue;
    std::copy_n(forward_.begin() + static_cast<std::ptrdiff_t>(logical * k_), k_,
                scratch.begin());
    for (std::size_t g = group; g < i; ++g) {
      scratch[by_origin[g]->origin.ordinal] = by_origin[g]->to;
    }
    for (std::size_t g = group; g < i; ++g) {
      const ShareMove& m = *by_origin[g];
      if (m.to.in_stash()) continue;
      for (std::uint32_t j = 0; j < k_; ++j) {
        if (j != m.origin.ordinal && scratch[j].block == m.to.block) {
          throw DomainError("remap: two shares of one logical block on the same physical block");
        }
      }
    }
  }

  for (const std::uint64_t v : vacated) reverse_[v] = kFree;
  occupied_ -= vacated.size();
  for (const auto& m : moves) {
    const std::uint64_t e = entry_index(m.origin);
    forward_[e] = m.to;
    if (!m.to.in_stash()) reverse_[slot_index(m.to)] = e;
  }
  occupied_ += targets.size();
}

std::vector<ShareLocation> SsmMap::free_slots_in(std::span<const std::uint64_t> blocks) const {
  std::vector<ShareLocation> out;
  for (const std::uint64_t b : blocks) {
    check_slot(ShareLocation{b, 0});
    for (std::uint32_t s = 0; s < s_; ++s) {
      if (reverse_[b * s_ + s] == kFree) out.push_back(ShareLocation{b, s});
    }
  }
  return out;
}

std::uint64_t SsmMap::map_bytes() const noexcept {
  // One packed slot address per share, rounded up to whole bytes.
  const std::uint64_t slots = physical_blocks_ * s_ + 1;  // +1 encodes "in stash"
  const auto bits = static_cast<std::uint64_t>(std::bit_width(slots));
  return (logical_blocks_ * k_ * bits + 7) / 8;
}

bool SsmMap::check_consistency() const {
  std::uint64_t occupied = 0;
  std::vector<std::uint64_t> blocks;
  for (std::uint64_t logical = 0; logical < logical_blocks_; ++logical) {
    blocks.clear();
    for (std::uint32_t j = 0; j < k_; ++j) {
      const std::uint64_t e = logical * k_ + j;
      const ShareLocation loc = forward_[e];
      if (loc.in_stash()) continue;
      if (loc.block >= physical_blocks_ || loc.slot >= s_) return false;
      if (reverse_[slot_index(loc)] != e) return false;
      blocks.push_back(loc.block);
      ++occupied;
    }
    std::ranges::sort(blocks);
    if (std::ranges::adjacent_find(blocks) != blocks.end()) return false;
  }
  std::uint64_t owned = 0;
  for (std::uint64_t i = 0; i < reverse_.size(); ++i) {
    const std::uint64_t e = reverse_[i];
    if (e == kFree) continue;
    if (e >= forward_.size() || slot_index(forward_[e]) != i || forward_[e].in_stash()) {
      return false;
    }
    ++owned;
  }
  return owned == occupied && occupied == occupied_;
}

void SsmMap::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  put<std::uint64_t>(out, logical_blocks_);
  put<std::uint64_t>(out, physical_blocks_);
  put<std::uint32_t>(out, s_);
  put<std::uint32_t>(out, params_.shares);
  put<std::uint32_t>(out, params_.threshold);
  put<std::uint32_t>(out, params_.segments);
  put<std::uint32_t>(out, params_.seed_coeffs);
  for (const auto& loc : forward_) {
    put<std::uint64_t>(out, loc.block);
    put<std::uint32_t>(out, loc.slot);
  }
}

SsmMap SsmMap::load(std::istream& in) {
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) {
    throw ConfigError("map load: bad magic");
  }
  const auto logical = get<std::uint64_t>(in);
  const auto physical = get<std::uint64_t>(in);
  const auto s = get<std::uint32_t>(in);
  CodecParams params;
  params.shares = get<std::uint32_t>(in);
  params.threshold = get<std::uint32_t>(in);
  params.segments = get<std::uint32_t>(in);
  params.seed_coeffs = get<std::uint32_t>(in);
  params.validate();
  if (s == 0 || logical * params.shares > physical * s) {
    throw ConfigError("map load: inconsistent geometry");
  }

  SsmMap map(logical, physical, s, params);
  for (std::uint64_t e = 0; e < map.forward_.size(); ++e) {
    ShareLocation loc;
    loc.block = get<std::uint64_t>(in);
    loc.slot = get<std::uint32_t>(in);
    map.forward_[e] = loc;
    if (loc.in_stash()) continue;
    if (loc.block >= physical || loc.slot >= s || map.reverse_[map.slot_index(loc)] != kFree) {
      throw ConfigError("map load: invalid or conflicting location");
    }
    map.reverse_[map.slot_index(loc)] = e;
    ++map.occupied_;
  }
  if (!map.check_consistency()) throw ConfigError("map load: distinct-block rule violated");
  return map;
}

}  // namespace ssm
