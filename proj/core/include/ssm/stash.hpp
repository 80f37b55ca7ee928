#pragma once

// On-controller share cache. Entries are keyed by share origin; occupancy is
// 16 bytes per entry.

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "ssm/codec.hpp"
#include "ssm/layout.hpp"

namespace ssm {

struct StashConfig {
  std::uint64_t capacity_bytes = 32768;
  double high_watermark = 0.75;
  double low_watermark = 0.5;

  void validate() const;  // 0 < low < high <= 1, capacity >= one entry
  std::uint64_t capacity_entries() const noexcept { return capacity_bytes / kShareBytes; }
  std::uint64_t high_bytes() const noexcept;
  std::uint64_t low_bytes() const noexcept;
  std::uint64_t low_entries() const noexcept { return low_bytes() / kShareBytes; }
};

struct StashEntry {
  ShareOrigin origin;
  Share share;
};

/// True iff occupancy has reached the high watermark.
bool needs_shuffle(const StashConfig& cfg, std::uint64_t occupancy_bytes) noexcept;

class Stash {
 public:
  explicit Stash(const StashConfig& cfg);

  /// Adds or overwrites by origin. All-or-nothing: throws StashOverflow and
  /// leaves the stash unchanged if the result would exceed capacity.
  void insert(std::span<const StashEntry> entries);
  void insert(const StashEntry& entry) { insert(std::span(&entry, 1)); }

  /// Counts a hit or miss; contents are not modified.
  std::optional<Share> lookup(ShareOrigin origin) const;
  /// Uncounted lookup for diagnostics.
  std::optional<Share> peek(ShareOrigin origin) const;
  bool contains(ShareOrigin origin) const { return index_.contains(key(origin)); }

  bool erase(ShareOrigin origin);

  /// Removes and returns a uniformly random subset of at least
  /// `target_bytes` (whole entries). Throws DomainError if target exceeds
  /// occupancy.
  std::vector<StashEntry> select_evictions(Rng& rng, std::uint64_t target_bytes);
  /// As above, by entry count.
  std::vector<StashEntry> take_random(Rng& rng, std::size_t count);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::uint64_t occupancy_bytes() const noexcept { return entries_.size() * kShareBytes; }
  std::span<const StashEntry> entries() const noexcept { return entries_; }
  const StashConfig& config() const noexcept { return cfg_; }

  std::uint64_t hits() const noexcept { return hits_; }
  std::uint64_t misses() const noexcept { return misses_; }

 private:
  static std::uint64_t key(ShareOrigin o) noexcept { return (o.logical << 16) ^ o.ordinal; }
  void remove_at(std::size_t i);

  StashConfig cfg_;
  std::vector<StashEntry> entries_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  mutable std::uint64_t hits_ = 0;
  mutable std::uint64_t misses_ = 0;
};

}  // namespace ssm
