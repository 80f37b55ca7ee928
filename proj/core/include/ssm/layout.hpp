#pragma once

// The SSM map: logical block -> K share locations, with a reverse index over
// every physical slot. A location may also be "in the stash" (on-controller).

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ssm/codec.hpp"

namespace ssm {

using Rng = std::mt19937_64;

struct ShareLocation {
  static constexpr std::uint64_t kStashBlock = std::numeric_limits<std::uint64_t>::max();

  std::uint64_t block = kStashBlock;
  std::uint32_t slot = 0;

  static constexpr ShareLocation stash() noexcept { return ShareLocation{}; }
  constexpr bool in_stash() const noexcept { return block == kStashBlock; }

  friend constexpr auto operator<=>(const ShareLocation&, const ShareLocation&) = default;
};

/// Identifies a share by its logical block and ordinal in [0, K).
struct ShareOrigin {
  std::uint64_t logical = 0;
  std::uint32_t ordinal = 0;

  friend constexpr auto operator<=>(const ShareOrigin&, const ShareOrigin&) = default;
};

struct GeometryConfig {
  std::uint64_t logical_blocks = 4096;
  std::uint32_t shares_per_block = 4;  // S
  std::uint64_t physical_blocks = 0;   // 0: derive from slack
  double slack = 1.1;

  /// physical_blocks, or ceil(logical * K / S * slack) when unset.
  std::uint64_t resolved_physical_blocks(const CodecParams& params) const;
};

struct ShareMove {
  ShareOrigin origin;
  ShareLocation to;
};

class SsmMap {
 public:
  /// Places every logical block's K shares on K distinct physical blocks,
  /// uniformly at random. Throws ConfigError if capacity is insufficient.
  static SsmMap init_layout(const GeometryConfig& geom, const CodecParams& params, Rng& rng);

  std::uint64_t logical_blocks() const noexcept { return logical_blocks_; }
  std::uint64_t physical_blocks() const noexcept { return physical_blocks_; }
  std::uint32_t shares_per_logical() const noexcept { return k_; }
  std::uint32_t slots_per_block() const noexcept { return s_; }

  /// The K current locations of `logical`. Throws DomainError if out of range.
  std::span<const ShareLocation> lookup(std::uint64_t logical) const;

  /// Owner of a physical slot, or nullopt when FREE.
  std::optional<ShareOrigin> owner(ShareLocation loc) const;

  /// Applies all moves or none. A target must be the stash, a FREE slot, or a
  /// slot vacated by the same batch; afterwards each logical block's
  /// in-memory shares must sit on distinct physical blocks. Throws
  /// DomainError (map unchanged) otherwise.
  void remap(std::span<const ShareMove> moves);

  /// Every FREE slot within `blocks`.
  std::vector<ShareLocation> free_slots_in(std::span<const std::uint64_t> blocks) const;

  std::uint64_t occupied_slots() const noexcept { return occupied_; }
  std::uint64_t stash_resident() const noexcept {
    return logical_blocks_ * k_ - occupied_;
  }
  std::uint32_t occupied_in_block(std::uint64_t block) const;

  /// Size of the forward table as it would be stored by a controller.
  std::uint64_t map_bytes() const noexcept;

  /// Full forward/reverse consistency and distinct-block check; returns false
  /// on any violation.
  bool check_consistency() const;

  /// Deterministic little-endian dump: header (magic, geometry, codec
  /// params) followed by the forward table.
  void save(std::ostream& out) const;
  static SsmMap load(std::istream& in);

  const CodecParams& codec() const noexcept { return params_; }

 private:
  static constexpr std::uint64_t kFree = std::numeric_limits<std::uint64_t>::max();

  SsmMap(std::uint64_t logical, std::uint64_t physical, std::uint32_t s, const CodecParams& p);

  std::uint64_t slot_index(ShareLocation loc) const noexcept {
    return loc.block * s_ + loc.slot;
  }
  std::uint64_t entry_index(ShareOrigin o) const noexcept { return o.logical * k_ + o.ordinal; }
  void check_slot(ShareLocation loc) const;

  std::uint64_t logical_blocks_;
  std::uint64_t physical_blocks_;
  std::uint32_t s_;
  std::uint32_t k_;
  CodecParams params_;
  std::vector<ShareLocation> forward_;  // logical * K
  std::vector<std::uint64_t> reverse_;  // physical * S, entry index or kFree
  std::uint64_t occupied_ = 0;
};

}  // namespace ssm
