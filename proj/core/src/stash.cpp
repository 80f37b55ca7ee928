#include "ssm/stash.hpp"

#include <algorithm>
#include <cmath>

#include "ssm/random.hpp"

namespace ssm {

void StashConfig::validate() const {
  if (!(low_watermark > 0.0 && low_watermark < high_watermark && high_watermark <= 1.0)) {
    throw ConfigError("stash: need 0 < low_watermark < high_watermark <= 1");
  }
  if (capacity_bytes < kShareBytes) throw ConfigError("stash: capacity below one entry");
}

std::uint64_t StashConfig::high_bytes() const noexcept {
  return static_cast<std::uint64_t>(std::ceil(high_watermark * static_cast<double>(capacity_bytes)));
}

std::uint64_t StashConfig::low_bytes() const noexcept {
  return static_cast<std::uint64_t>(std::floor(low_watermark * static_cast<double>(capacity_bytes)));
}

bool needs_shuffle(const StashConfig& cfg, std::uint64_t occupancy_bytes) noexcept {
  return static_cast<double>(occupancy_bytes) >=
         cfg.high_watermark * static_cast<double>(cfg.capacity_bytes);
}

Stash::Stash(const StashConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  entries_.reserve(cfg_.capacity_entries());
  index_.reserve(cfg_.capacity_entries());
}

void Stash::insert(std::span<const StashEntry> entries) {
  std::vector<std::uint64_t> fresh_keys;
  for (const auto& e : entries) {
    if (!index_.contains(key(e.origin))) fresh_keys.push_back(key(e.origin));
  }
  std::ranges::sort(fresh_keys);
  const auto fresh = static_cast<std::size_t>(
      std::unique(fresh_keys.begin(), fresh_keys.end()) - fresh_keys.begin());
  if ((entries_.size() + fresh) * kShareBytes > cfg_.capacity_bytes) {
    throw StashOverflow("stash: insert would exceed capacity");
  }
  for (const auto& e : entries) {
    const auto [it, inserted] = index_.try_emplace(key(e.origin), entries_.size());
    if (inserted) {
      entries_.push_back(e);
    } else {
      entries_[it->second] = e;
    }
  }
}

std::optional<Share> Stash::lookup(ShareOrigin origin) const {
  const auto it = index_.find(key(origin));
  if (it == index_.end()) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return entries_[it->second].share;
}

std::optional<Share> Stash::peek(ShareOrigin origin) const {
  const auto it = index_.find(key(origin));
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].share;
}

void Stash::remove_at(std::size_t i) {
  index_.erase(key(entries_[i].origin));
  if (i + 1 != entries_.size()) {
    entries_[i] = entries_.back();
    index_[key(entries_[i].origin)] = i;
  }
  entries_.pop_back();
}

bool Stash::erase(ShareOrigin origin) {
  const auto it = index_.find(key(origin));
  if (it == index_.end()) return false;
  remove_at(it->second);
  return true;
}

std::vector<StashEntry> Stash::take_random(Rng& rng, std::size_t count) {
  if (count > entries_.size()) throw DomainError("stash: eviction target exceeds occupancy");
  std::vector<StashEntry> out;
  out.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const auto i = static_cast<std::size_t>(uniform_below(rng, entries_.size()));
    out.push_back(entries_[i]);
    remove_at(i);
  }
  return out;
}

std::vector<StashEntry> Stash::select_evictions(Rng& rng, std::uint64_t target_bytes) {
  if (target_bytes > occupancy_bytes()) {
    throw DomainError("stash: eviction target exceeds occupancy");
  }
  return take_random(rng, static_cast<std::size_t>((target_bytes + kShareBytes - 1) / kShareBytes));
}

}  // namespace ssm
